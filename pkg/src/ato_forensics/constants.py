"""Shared time and travel-model constants.

A "month" is fixed at 30 days everywhere so analysis windows are
deterministic and independent of calendar semantics.
"""

SECONDS_PER_DAY = 86_400
SECONDS_PER_WEEK = 604_800
SECONDS_PER_MONTH = 30 * SECONDS_PER_DAY

# +/- window used to relate emails, inbox-rule detections, and sensitive
# account operations to nearby login events (5 hours).
INDICATOR_WINDOW_SECONDS = 18_000

# Travel-time model: great-circle distance at cruise speed plus a fixed
# boarding/transfer overhead. Zero overhead when origin == destination.
CRUISE_SPEED_KMH = 800.0
TRAVEL_OVERHEAD_SECONDS = 3_600.0
EARTH_RADIUS_KM = 6_371.0

# Operations whose proximity to attacker activity is reported per case.
OP_CHANGE_PASSWORD = "Change user password"
OP_ADD_OAUTH = "Add OAuth"
