"""
Tests for the built-in SEIR model with building contamination.
"""

import numpy as np
import pytest

from param_sweep.models import EpidemicParams
from param_sweep.refmodel import (
    Status,
    decay_viral_load,
    environmental_infection,
    infectious_occupancy,
    init_world,
    move_agents,
    release_viral_load,
    run_simulation,
    step_hour,
)
from param_sweep.trajectory import COLUMNS

from .conftest import SMALL_MODEL


def fast_params(**overrides) -> EpidemicParams:
    """Every stage lasts one hour."""
    values = dict(
        population=8,
        n_buildings=2,
        initial_infected=8,
        latent_hours=1,
        presymptomatic_hours=1,
        infectious_hours=1,
        hospital_hours=1,
        icu_hours=1,
    )
    values.update(overrides)
    return EpidemicParams(**values)


class TestInitWorld:
    """Tests for world initialization."""

    def test_building_range(self):
        """Homes and workplaces are valid building indices and loads start at zero."""
        world = init_world(EpidemicParams(population=10, n_buildings=3, initial_infected=2), 7)
        assert set(world.home.tolist()) <= {0, 1, 2}
        assert set(world.workplace.tolist()) <= {0, 1, 2}
        assert world.viral_load.tolist() == [0.0, 0.0, 0.0]

    def test_no_initial_infection(self):
        """A world without initial infections is all susceptible."""
        world = init_world(EpidemicParams(initial_infected=0), 1)
        assert (world.status == Status.SUSCEPTIBLE).all()

    def test_initial_infected_are_latent(self, small_params):
        """Initial infections start latent with a full countdown."""
        world = init_world(small_params, 3)
        counts = world.status_counts()
        assert counts[Status.LATENT] == 4
        assert counts[Status.SUSCEPTIBLE] == 56
        latent = world.status == Status.LATENT
        assert (world.stage_hours_left[latent] == small_params.latent_hours).all()

    def test_same_seed_same_world(self, small_params):
        """The same seed builds the same world."""
        first = init_world(small_params, 11)
        second = init_world(small_params, 11)
        for name in ("status", "stage_hours_left", "home", "workplace", "location", "viral_load"):
            assert np.array_equal(getattr(first, name), getattr(second, name))

    def test_agent_view(self, small_params):
        """Agent and building views mirror the arrays."""
        world = init_world(small_params, 3)
        agent = world.agent(5)
        assert agent.id == 5
        assert agent.home == int(world.home[5])
        assert isinstance(agent.status, Status)
        assert len(world.buildings()) == small_params.n_buildings


class TestStepPhases:
    """Tests for the sub-phases of one simulated hour."""

    def test_mobility_follows_working_hours(self, small_params):
        """Agents go to work in working hours and home otherwise."""
        world = init_world(small_params, 1)
        world.hour = 8
        move_agents(world)
        assert np.array_equal(world.location, world.workplace)

        world.hour = 18
        move_agents(world)
        assert np.array_equal(world.location, world.home)

        world.hour = 24 + 17
        move_agents(world)
        assert np.array_equal(world.location, world.workplace)

    def test_immobile_agents_stay(self, small_params):
        """Hospitalized and dead agents do not move."""
        world = init_world(small_params, 1)
        world.status[0] = Status.HOSPITALIZED
        world.status[1] = Status.DEAD
        world.location[0] = 4
        world.location[1] = 5
        world.hour = 9
        move_agents(world)
        assert world.location[0] == 4
        assert world.location[1] == 5

    def test_additive_release(self):
        """Each infectious occupant adds the release to its building."""
        params = EpidemicParams(
            population=10, n_buildings=3, initial_infected=0, basic_viral_release=0.05
        )
        world = init_world(params, 1)
        world.location[:] = 0
        world.location[:2] = 1
        world.status[:2] = [Status.PRESYMPTOMATIC, Status.SYMPTOMATIC]
        world.status[2] = Status.LATENT

        occupancy = infectious_occupancy(world)
        assert occupancy.tolist() == [0, 2, 0]
        release_viral_load(world, occupancy)
        assert world.viral_load[1] == pytest.approx(0.1)
        assert world.viral_load[0] == 0.0

    def test_decay_without_infectious_agents(self):
        """Loads decay even when nobody releases."""
        params = EpidemicParams(
            population=10, n_buildings=3, initial_infected=0, basic_viral_decrease=0.1
        )
        world = init_world(params, 1)
        world.viral_load[:] = 1.0
        step_hour(world)
        assert world.viral_load.tolist() == pytest.approx([0.9, 0.9, 0.9])

    def test_geometric_decay(self):
        """Load decays geometrically over many hours."""
        params = EpidemicParams(
            population=20, n_buildings=4, initial_infected=5, basic_viral_release=0.0,
            basic_viral_decrease=0.07,
        )
        world = init_world(params, 2)
        world.viral_load[:] = [1.0, 2.0, 0.5, 0.0]
        initial = world.viral_load.copy()
        for t in range(1, 60):
            step_hour(world)
            expected = initial * (1 - 0.07) ** t
            assert np.allclose(world.viral_load, expected, rtol=1e-12, atol=0.0)

    def test_decay_law_on_random_cases(self):
        """Without infectious agents the load follows load0 * (1 - d) ** t."""
        rng = np.random.default_rng(5)
        for _ in range(50):
            decrease = float(rng.uniform(0.0, 1.0))
            n_buildings = int(rng.integers(1, 8))
            params = EpidemicParams(
                population=10,
                n_buildings=n_buildings,
                initial_infected=0,
                basic_viral_release=float(rng.uniform(0.0, 0.5)),
                basic_viral_decrease=decrease,
                env_infection_factor=0.0,
            )
            world = init_world(params, int(rng.integers(0, 1000)))
            initial = rng.uniform(0.0, 100.0, size=n_buildings)
            world.viral_load[:] = initial
            hours = int(rng.integers(1, 501))
            for _ in range(hours):
                step_hour(world)
            expected = initial * (1.0 - decrease) ** hours
            assert np.allclose(world.viral_load, expected, rtol=1e-12, atol=1e-300)

    def test_saturated_environment_infects_everyone(self):
        """A load at or above saturation infects every occupant."""
        params = EpidemicParams(
            population=20, n_buildings=1, initial_infected=0, env_infection_factor=1.0
        )
        world = init_world(params, 4)
        world.viral_load[0] = 1.0
        infected = environmental_infection(world)
        assert sorted(infected.tolist()) == list(range(20))
        assert (world.status == Status.LATENT).all()

    def test_fresh_infections_start_counting_next_hour(self):
        """Freshly infected agents keep their full latent countdown."""
        params = EpidemicParams(
            population=20, n_buildings=1, initial_infected=0, env_infection_factor=1.0
        )
        world = init_world(params, 4)
        world.viral_load[0] = 5.0
        step_hour(world)
        assert (world.status == Status.LATENT).all()
        assert (world.stage_hours_left == params.latent_hours).all()

    def test_no_transmission_without_load_or_contact(self):
        """Nobody is infected without load or contact."""
        params = EpidemicParams(**{**SMALL_MODEL, "direct_transmission_prob": 0.0})
        world = init_world(params, 9)
        for _ in range(48):
            before = int(world.status_counts()[Status.SUSCEPTIBLE])
            world.viral_load[:] = 0.0
            move_agents(world)
            assert environmental_infection(world).size == 0
            assert int(world.status_counts()[Status.SUSCEPTIBLE]) == before
            world.hour += 1

    def test_decay_phase_alone(self):
        """The decay phase multiplies each load by 1 - d."""
        world = init_world(EpidemicParams(basic_viral_decrease=0.2, initial_infected=0), 1)
        world.viral_load[:] = 2.0
        decay_viral_load(world)
        assert world.viral_load == pytest.approx(np.full(world.viral_load.size, 1.6))


class TestProgression:
    """Tests for stage transitions."""

    def test_asymptomatic_path(self):
        """Asymptomatic agents recover after their stage."""
        trajectory = run_simulation(fast_params(p_asymptomatic=1.0), seed=1, final_step=3)
        presymptomatic, asymptomatic, recovered = (
            trajectory.series(name) for name in ("presymptomatic", "asymptomatic", "recovered")
        )
        assert presymptomatic.tolist() == [8, 0, 0]
        assert asymptomatic.tolist() == [0, 8, 0]
        assert recovered.tolist() == [0, 0, 8]

    def test_fatal_path(self):
        """A certain-death path goes through hospital and ICU."""
        params = fast_params(p_asymptomatic=0.0, p_hospitalize=1.0, p_icu=1.0, p_die=1.0)
        trajectory = run_simulation(params, seed=1, final_step=6)
        assert trajectory.series("presymptomatic").tolist() == [8, 0, 0, 0, 0, 0]
        assert trajectory.series("symptomatic").tolist() == [0, 8, 0, 0, 0, 0]
        assert trajectory.series("hospitalized").tolist() == [0, 0, 8, 0, 0, 0]
        assert trajectory.series("icu").tolist() == [0, 0, 0, 8, 0, 0]
        assert trajectory.series("deaths").tolist() == [0, 0, 0, 0, 8, 8]

    def test_symptomatic_recover_without_hospital(self):
        """Symptomatic agents recover when never hospitalized."""
        params = fast_params(p_asymptomatic=0.0, p_hospitalize=0.0)
        trajectory = run_simulation(params, seed=1, final_step=3)
        assert trajectory.series("recovered").tolist() == [0, 0, 8]
        assert trajectory.series("hospitalized").max() == 0

    def test_absorbing_states(self, small_params):
        """Recovered and dead agents never change state."""
        world = init_world(small_params, 5)
        absorbed = {}
        for _ in range(150):
            step_hour(world)
            for agent_id, status in absorbed.items():
                assert world.status[agent_id] == status
            for status in (Status.RECOVERED, Status.DEAD):
                for agent_id in np.flatnonzero(world.status == status):
                    absorbed.setdefault(int(agent_id), status)
        assert absorbed


class TestRunSimulation:
    """Tests for whole simulations."""

    @pytest.mark.parametrize("seed", [0, 1, 42])
    def test_conservation(self, small_params, seed):
        """Every step accounts for the whole population."""
        trajectory = run_simulation(small_params, seed=seed, final_step=120)
        totals = trajectory.rows[:, 1:].sum(axis=1) + trajectory.latent
        assert (totals == small_params.population).all()

    def test_conservation_with_contamination(self):
        """Contamination keeps the population conserved."""
        params = EpidemicParams(
            **{**SMALL_MODEL, "basic_viral_release": 0.1, "basic_viral_decrease": 0.02}
        )
        trajectory = run_simulation(params, seed=3, final_step=150)
        totals = trajectory.rows[:, 1:].sum(axis=1) + trajectory.latent
        assert (totals == params.population).all()

    @pytest.mark.parametrize("indicator", ["deaths", "recovered"])
    def test_monotone_indicators(self, small_params, indicator):
        """Deaths and recoveries never decrease."""
        trajectory = run_simulation(small_params, seed=8, final_step=200)
        assert (np.diff(trajectory.series(indicator)) >= 0).all()

    @pytest.mark.slow
    def test_random_worlds_conserve_and_accumulate(self):
        """200 random parameter sets and seeds keep every agent and never undo deaths."""
        rng = np.random.default_rng(17)
        for _ in range(200):
            population = int(rng.integers(1, 200))
            params = EpidemicParams(
                population=population,
                n_buildings=int(rng.integers(1, 30)),
                initial_infected=int(rng.integers(0, population + 1)),
                basic_viral_release=float(rng.uniform(0.0, 0.2)),
                basic_viral_decrease=float(rng.uniform(0.0, 1.0)),
                direct_transmission_prob=float(rng.uniform(0.0, 0.3)),
                env_infection_factor=float(rng.uniform(0.0, 2.0)),
                latent_hours=int(rng.integers(1, 72)),
                presymptomatic_hours=int(rng.integers(1, 48)),
                infectious_hours=int(rng.integers(1, 200)),
                hospital_hours=int(rng.integers(1, 150)),
                icu_hours=int(rng.integers(1, 150)),
                p_asymptomatic=float(rng.uniform()),
                p_hospitalize=float(rng.uniform()),
                p_icu=float(rng.uniform()),
                p_die=float(rng.uniform()),
            )
            trajectory = run_simulation(
                params, seed=int(rng.integers(0, 2**31)), final_step=500
            )
            totals = trajectory.rows[:, 1:].sum(axis=1) + trajectory.latent
            assert (totals == population).all()
            assert (np.diff(trajectory.series("deaths")) >= 0).all()
            assert (np.diff(trajectory.series("recovered")) >= 0).all()
            assert (np.diff(trajectory.series("susceptible")) <= 0).all()

    def test_rows_and_steps(self, small_params):
        """Rows are numbered from step 0 and carry the task identity."""
        trajectory = run_simulation(small_params, seed=0, final_step=30, task_id=7, point_index=2)
        assert trajectory.rows.shape == (30, len(COLUMNS))
        assert trajectory.steps.tolist() == list(range(30))
        assert trajectory.task_id == 7
        assert trajectory.point_index == 2

    def test_deterministic(self, small_params):
        """The same seed gives the same trajectory."""
        first = run_simulation(small_params, seed=13, final_step=100)
        second = run_simulation(small_params, seed=13, final_step=100)
        assert first.same_data(second)

    def test_seed_matters(self):
        """Different seeds give different trajectories."""
        params = EpidemicParams(
            **{**SMALL_MODEL, "basic_viral_release": 0.1, "direct_transmission_prob": 0.2}
        )
        runs = [run_simulation(params, seed=seed, final_step=100).rows for seed in range(5)]
        assert any(not np.array_equal(runs[0], other) for other in runs[1:])

    def test_immediate_extinction(self):
        """A world with no infection stops after its first row."""
        params = EpidemicParams(population=30, n_buildings=3, initial_infected=0)
        trajectory = run_simulation(params, seed=0, final_step=50, stop_on_extinction=True)
        assert len(trajectory) == 1
        assert trajectory.series("susceptible").tolist() == [30]

    def test_stops_after_extinction(self, small_params):
        """Extinction stops the run with no active or latent agents."""
        trajectory = run_simulation(
            small_params, seed=2, final_step=5000, stop_on_extinction=True
        )
        assert len(trajectory) < 5000
        last = trajectory.rows[-1]
        for name in ("presymptomatic", "asymptomatic", "symptomatic", "hospitalized", "icu"):
            assert last[COLUMNS.index(name)] == 0
        assert trajectory.latent[-1] == 0

    def test_no_transmission_keeps_susceptible_constant(self):
        """Without transmission the susceptible count stays constant."""
        params = EpidemicParams(
            **{**SMALL_MODEL, "basic_viral_release": 0.0, "direct_transmission_prob": 0.0}
        )
        trajectory = run_simulation(params, seed=6, final_step=100)
        assert (trajectory.series("susceptible") == 56).all()

    def test_runs_to_final_step_without_stopping(self):
        """Without stopping the run lasts finalStep rows."""
        params = EpidemicParams(population=30, n_buildings=3, initial_infected=0)
        assert len(run_simulation(params, seed=0, final_step=25)) == 25
