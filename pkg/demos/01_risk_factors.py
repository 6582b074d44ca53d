"""Walk through the risk engine on a hand-built approach trace.

A drone starts 20 m out and closes at 0.5 m/s. The engine samples the
inverse-distance score and sound-pressure proxy once per second and the
approach-velocity estimate every two seconds; once all three windows are
full (10 s in) it emits a factor breakdown each second.
"""

from preysim import BatteryModel, RiskEngine, SampleWindow, SlopeMode, battery_depletion, window_slope


def approach(t):
    return 20.0 - 0.5 * t


engine = RiskEngine()
battery = BatteryModel()

print("t      d       r_dist  r_sound r_vel   r_batt  total")
dt = 0.05
for step in range(int(80.0 / dt) + 1):
    t = step * dt
    distance = approach(t)
    if distance < 0.15:  # a real episode ends in capture here
        break
    breakdown = engine.ingest(t, distance, battery_depletion(t, battery))
    if breakdown is not None:
        print(
            f"{t:5.1f}  {distance:6.2f}  {breakdown.distance:.4f}  {breakdown.sound:.4f}"
            f"  {breakdown.velocity:.4f}  {breakdown.battery:.4f}  {breakdown.total:.4f}"
        )

# The total climbs as the drone closes: the inverse-distance score 100/d
# steepens, so its windowed slope (and the sound proxy's, 60/d) grows.
# The velocity factor stays at zero here because a constant closing speed
# has a flat window gradient.

# The two slope conventions on one window of linear data:
window = SampleWindow()
for t, value in zip(range(1, 6), (10.0, 20.0, 30.0, 40.0, 50.0)):
    window.push(float(t), value)
print()
print("slope of 10..50 over t=1..5")
print("  standard (least squares):", window_slope(window, SlopeMode.STANDARD))
print("  value-normalized        :", window_slope(window, SlopeMode.VALUE_NORMALIZED))
