"""Controller tests for the rover behavior modes and the drone pursuit FSM."""

import math
import random

import numpy as np
import pytest

from preysim.behaviors import (
    PERSISTENT,
    DroneMode,
    DronePhase,
    DroneState,
    ProteanParams,
    RoverBehaviorState,
    RoverMode,
    apply_behavior_transition,
    drone_step,
    protean_subgoal,
    rover_step,
)
from preysim.errors import ContractViolation
from preysim.model import Pose2, Position3, SimParams, WorldState, angle_wrap, euclidean_distance
from preysim.risk import BehaviorCommand


def make_world(rover=Pose2(0, 0, 0), drone=Position3(-10, 0, 0.1), drone_heading=0.0,
               goal=Position3(10, 0, 0), refuge=Position3(0, 10, 0), t=0.0):
    return WorldState(rover=rover, drone=drone, drone_heading=drone_heading, goal=goal, refuge=refuge, t=t)


PARAMS = SimParams()
PROTEAN = ProteanParams()


class TestRoverStep:
    def test_task_translates_at_task_speed(self):
        world = make_world()
        pose, state = rover_step(RoverBehaviorState(RoverMode.TASK), world, PARAMS, PROTEAN, np.random.default_rng(0))
        assert pose.x == pytest.approx(PARAMS.rover_speed * PARAMS.dt, abs=1e-12)
        assert pose.y == 0.0
        assert state.mode is RoverMode.TASK

    def test_large_heading_error_rotates_in_place(self):
        world = make_world(rover=Pose2(0, 0, math.pi))
        pose, _ = rover_step(RoverBehaviorState(RoverMode.TASK), world, PARAMS, PROTEAN, np.random.default_rng(0))
        assert (pose.x, pose.y) == (0.0, 0.0)
        assert pose.heading == pytest.approx(angle_wrap(math.pi + PARAMS.rover_turn_rate * PARAMS.dt))

    def test_flee_translates_at_double_speed(self):
        world = make_world()
        pose, _ = rover_step(RoverBehaviorState(RoverMode.FLEE), world, PARAMS, PROTEAN, np.random.default_rng(0))
        assert pose.x == pytest.approx(2.0 * PARAMS.rover_speed * PARAMS.dt, abs=1e-12)

    def test_refuge_mode_heads_for_refuge(self):
        world = make_world(rover=Pose2(0, 0, math.pi / 2))
        pose, _ = rover_step(RoverBehaviorState(RoverMode.REFUGE), world, PARAMS, PROTEAN, np.random.default_rng(0))
        assert pose.y == pytest.approx(2.0 * PARAMS.rover_speed * PARAMS.dt, abs=1e-12)

    def test_stopped_rover_cannot_step(self):
        with pytest.raises(ContractViolation):
            rover_step(RoverBehaviorState(RoverMode.STOPPED), make_world(), PARAMS, PROTEAN, np.random.default_rng(0))

    def test_speed_partition(self):
        # per-step displacement is exactly 0, v*dt, or 2*v*dt
        rnd = random.Random(8)
        rng = np.random.default_rng(8)
        allowed = (0.0, PARAMS.rover_speed * PARAMS.dt, 2.0 * PARAMS.rover_speed * PARAMS.dt)
        for _ in range(300):
            mode = rnd.choice((RoverMode.TASK, RoverMode.FLEE, RoverMode.PROTEAN, RoverMode.REFUGE))
            world = make_world(
                rover=Pose2(rnd.uniform(-20, 20), rnd.uniform(-20, 20), rnd.uniform(-4, 4)),
                drone=Position3(rnd.uniform(-20, 20), rnd.uniform(-20, 20), 0.1),
                goal=Position3(rnd.uniform(-20, 20), rnd.uniform(-20, 20)),
                refuge=Position3(rnd.uniform(-20, 20), rnd.uniform(-20, 20)),
            )
            pose, _ = rover_step(RoverBehaviorState(mode), world, PARAMS, PROTEAN, rng)
            displacement = math.hypot(pose.x - world.rover.x, pose.y - world.rover.y)
            assert min(abs(displacement - a) for a in allowed) < 1e-12

    def test_protean_samples_subgoal_lazily_and_on_arrival(self):
        world = make_world()
        rng = np.random.default_rng(42)
        _, state = rover_step(RoverBehaviorState(RoverMode.PROTEAN), world, PARAMS, PROTEAN, rng)
        assert state.subgoal is not None
        first = state.subgoal
        # not at the subgoal yet: it stays put
        _, state = rover_step(state, world, PARAMS, PROTEAN, rng)
        assert state.subgoal == first
        # teleport the rover onto the subgoal: next step resamples
        world.rover = Pose2(first.x, first.y, 0.0)
        _, state = rover_step(state, world, PARAMS, PROTEAN, rng)
        assert state.subgoal != first

    def test_pure_function_of_inputs(self):
        world = make_world(rover=Pose2(1, 2, 0.3))
        state = RoverBehaviorState(RoverMode.PROTEAN)
        out1 = rover_step(state, world, PARAMS, PROTEAN, np.random.default_rng(17))
        out2 = rover_step(state, world, PARAMS, PROTEAN, np.random.default_rng(17))
        assert out1 == out2


class TestProteanSubgoal:
    def test_zero_jitter_points_directly_away(self):
        params = ProteanParams(subgoal_distance=5.0, heading_jitter=0.0, arrival_radius=0.5)
        subgoal = protean_subgoal(Pose2(0, 0, 0), Position3(0, -5, 0), params, np.random.default_rng(1))
        assert subgoal.x == pytest.approx(0.0, abs=1e-9)
        assert subgoal.y == pytest.approx(5.0, abs=1e-9)

    def test_jitter_bounded_around_away_bearing(self):
        params = ProteanParams(subgoal_distance=5.0, heading_jitter=math.pi / 4, arrival_radius=0.5)
        for seed in range(60):
            subgoal = protean_subgoal(Pose2(0, 0, 0), Position3(0, -5, 0), params, np.random.default_rng(seed))
            bearing = math.atan2(subgoal.y, subgoal.x)
            assert math.pi / 2 - math.pi / 4 - 1e-12 <= bearing <= math.pi / 2 + math.pi / 4 + 1e-12

    def test_golden_seed_42(self):
        params = ProteanParams(subgoal_distance=6.0, heading_jitter=math.pi / 4, arrival_radius=0.5)
        subgoal = protean_subgoal(Pose2(0, 0, 0), Position3(0, -5, 0), params, np.random.default_rng(42))
        assert subgoal.x == pytest.approx(-2.503019821548555, abs=1e-12)
        assert subgoal.y == pytest.approx(5.452970912533372, abs=1e-12)
        assert subgoal.z == 0.0

    def test_always_in_half_plane_away_from_drone(self):
        rnd = random.Random(23)
        rng = np.random.default_rng(23)
        for _ in range(300):
            rover = Pose2(rnd.uniform(-10, 10), rnd.uniform(-10, 10), rnd.uniform(-3, 3))
            drone = Position3(rnd.uniform(-10, 10), rnd.uniform(-10, 10), 0.1)
            if (drone.x, drone.y) == (rover.x, rover.y):
                continue
            jitter = rnd.uniform(0.0, math.pi / 2)
            params = ProteanParams(subgoal_distance=5.0, heading_jitter=jitter, arrival_radius=0.5)
            subgoal = protean_subgoal(rover, drone, params, rng)
            away_x, away_y = rover.x - drone.x, rover.y - drone.y
            dot = (subgoal.x - rover.x) * away_x + (subgoal.y - rover.y) * away_y
            assert dot >= -1e-9

    def test_coincident_drone_falls_back_to_rover_heading(self):
        params = ProteanParams(subgoal_distance=5.0, heading_jitter=0.0, arrival_radius=0.5)
        subgoal = protean_subgoal(Pose2(2, 2, math.pi / 2), Position3(2, 2, 3.0), params, np.random.default_rng(0))
        assert subgoal.x == pytest.approx(2.0, abs=1e-9)
        assert subgoal.y == pytest.approx(7.0, abs=1e-9)

    def test_draws_exactly_one_value(self):
        params = ProteanParams()
        rng_a = np.random.default_rng(55)
        protean_subgoal(Pose2(0, 0, 0), Position3(0, -5, 0), params, rng_a)
        rng_b = np.random.default_rng(55)
        rng_b.uniform(-params.heading_jitter, params.heading_jitter)
        assert rng_a.uniform(0, 1) == rng_b.uniform(0, 1)

    def test_param_validation(self):
        with pytest.raises(ValueError):
            ProteanParams(subgoal_distance=0.4, arrival_radius=0.5)
        with pytest.raises(ValueError):
            ProteanParams(heading_jitter=2.0)


class TestDroneStep:
    def test_aligned_pursuit_closes_at_drone_speed(self):
        params = SimParams(drone_cruise_altitude=0.0)
        world = make_world(drone=Position3(-10, 0, 0.0), drone_heading=0.0)
        state = DroneState(DronePhase.PURSUING, base=Position3(-10, 0, 0))
        before = euclidean_distance(world.rover.position(), world.drone)
        position, heading, state = drone_step(state, PERSISTENT, world, params)
        after = euclidean_distance(world.rover.position(), position)
        assert before - after == pytest.approx(params.drone_speed * params.dt, abs=1e-12)
        assert heading == 0.0
        assert state.phase is DronePhase.PURSUING

    def test_lift_is_vertical_then_pursues(self):
        world = make_world(drone=Position3(-10, 0, 0.0))
        state = DroneState(DronePhase.LIFTING, base=Position3(-10, 0, 0))
        # 0.1 m at 0.5 m/s and dt 0.05 takes 4 steps
        for step in range(4):
            position, heading, state = drone_step(state, PERSISTENT, world, PARAMS)
            assert (position.x, position.y) == (world.drone.x, world.drone.y)
            world.drone = position
        assert world.drone.z == pytest.approx(PARAMS.drone_cruise_altitude)
        assert state.phase is DronePhase.PURSUING

    def test_cautious_withdraws_after_giveup_time(self):
        mode = DroneMode(cautious=True, giveup_time=40.0)
        world = make_world(t=41.0)
        state = DroneState(DronePhase.PURSUING, base=Position3(-10, 0, 0))
        _, _, state = drone_step(state, mode, world, PARAMS)
        assert state.phase is DronePhase.WITHDRAWN

    def test_persistent_never_withdraws(self):
        world = make_world(t=80.0)
        state = DroneState(DronePhase.PURSUING, base=Position3(-10, 0, 0))
        _, _, state = drone_step(state, PERSISTENT, world, PARAMS)
        assert state.phase is DronePhase.PURSUING

    def test_withdrawn_heads_home_and_hovers(self):
        # turn-capped flight: it may swing wide first, but it must reach
        # base and then hold position there
        mode = DroneMode(cautious=True, giveup_time=40.0)
        base = Position3(-10, 0, 0)
        world = make_world(drone=Position3(5, 0, 0.1), drone_heading=0.0, t=50.0)
        state = DroneState(DronePhase.WITHDRAWN, base=base)
        for _ in range(2000):
            world.drone, world.drone_heading, state = drone_step(state, mode, world, PARAMS)
            if math.hypot(world.drone.x - base.x, world.drone.y - base.y) < PARAMS.goal_radius:
                break
        assert math.hypot(world.drone.x - base.x, world.drone.y - base.y) < PARAMS.goal_radius
        assert state.phase is DronePhase.WITHDRAWN
        parked = drone_step(state, mode, world, PARAMS)
        assert parked == (world.drone, world.drone_heading, state)

    def test_turn_capped_and_speed_exact(self):
        rnd = random.Random(12)
        for _ in range(300):
            world = make_world(
                rover=Pose2(rnd.uniform(-20, 20), rnd.uniform(-20, 20), 0.0),
                drone=Position3(rnd.uniform(-20, 20), rnd.uniform(-20, 20), 0.1),
                drone_heading=rnd.uniform(-math.pi, math.pi),
            )
            state = DroneState(DronePhase.PURSUING, base=Position3(0, 0, 0))
            position, heading, _ = drone_step(state, PERSISTENT, world, PARAMS)
            turn = abs(angle_wrap(heading - world.drone_heading))
            assert turn <= PARAMS.drone_turn_rate * PARAMS.dt + 1e-12
            moved = math.hypot(position.x - world.drone.x, position.y - world.drone.y)
            assert moved == pytest.approx(PARAMS.drone_speed * PARAMS.dt, abs=1e-12)
            assert position.z == world.drone.z

    def test_straight_flight_never_regains_on_fleeing_rover(self):
        # tail chase at 2v vs v_d: separation must be nondecreasing every step
        world = make_world(rover=Pose2(0, 0, 0), drone=Position3(-3, 0, 0.1), drone_heading=0.0,
                           goal=Position3(1000, 0, 0))
        behavior = RoverBehaviorState(RoverMode.FLEE)
        state = DroneState(DronePhase.PURSUING, base=Position3(-3, 0, 0))
        rng = np.random.default_rng(0)
        previous = euclidean_distance(world.rover.position(), world.drone)
        for _ in range(400):
            world.rover, behavior = rover_step(behavior, world, PARAMS, PROTEAN, rng)
            world.drone, world.drone_heading, state = drone_step(state, PERSISTENT, world, PARAMS)
            current = euclidean_distance(world.rover.position(), world.drone)
            assert current >= previous - 1e-12
            previous = current


class TestBehaviorTransitions:
    def test_dwell_blocks_early_switch(self):
        current = RoverBehaviorState(RoverMode.FLEE, entered_at=10.0)
        assert apply_behavior_transition(current, BehaviorCommand.REFUGE, 12.0, 5.0) is current

    def test_switch_after_dwell(self):
        current = RoverBehaviorState(RoverMode.FLEE, entered_at=10.0)
        updated = apply_behavior_transition(current, BehaviorCommand.REFUGE, 16.0, 5.0)
        assert updated.mode is RoverMode.REFUGE
        assert updated.entered_at == 16.0

    def test_same_selection_keeps_entry_time(self):
        current = RoverBehaviorState(RoverMode.TASK, entered_at=0.0)
        updated = apply_behavior_transition(current, BehaviorCommand.CONTINUE_TASK, 30.0, 5.0)
        assert updated is current

    def test_stopped_state_is_terminal(self):
        with pytest.raises(ContractViolation):
            apply_behavior_transition(RoverBehaviorState(RoverMode.STOPPED), BehaviorCommand.FLEE, 1.0, 0.0)

    def test_drone_mode_validation(self):
        with pytest.raises(ValueError):
            DroneMode(cautious=True, giveup_time=0.0)
        assert DroneMode(cautious=True).label == "cautious"
        assert PERSISTENT.label == "persistent"
