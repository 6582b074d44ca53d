"""Persistent versus cautious pursuit on the same scenarios.

A cautious drone abandons the chase at its give-up time (default 40 s)
and returns to base, after which it can no longer capture; the rover is
then free to finish the delivery. Compare final separations and outcomes
across a handful of seeds.
"""

from preysim import DroneMode, EpisodeConfig, generate_scenario, run_episode

print("seed   mode        outcome       t_end    d_final")
for seed in (3, 11, 29, 47, 92):
    scenario = generate_scenario(seed)
    for mode in (DroneMode(cautious=False), DroneMode(cautious=True, giveup_time=40.0)):
        record = run_episode(scenario, EpisodeConfig(preservation="B", drone_mode=mode))
        print(
            f"{seed:<5}  {mode.label:<10}  {record.outcome.value:<12} {record.t_end:6.2f} s"
            f"  {record.d_final:7.2f} m"
        )
    print()

# Against a cautious pursuer, episodes that pass the give-up time end
# with visibly larger separations: once the drone withdraws, the gap
# grows at the rover's own speed.
