"""
Built-in agent-based SEIR model with environmental contamination.

Agents commute between a home and a workplace building. Infectious agents
release viral load into the building they occupy; the load decays by a
fixed fraction every hour and infects susceptible occupants with a
probability proportional to the accumulated load. Direct contact between
co-located agents is a second transmission pathway.

Randomness comes from one ``numpy.random.Generator`` (PCG64) per simulation,
seeded with the task seed. Draws are consumed in a fixed order: homes,
workplaces, then the initially infected agents at initialization; then every
hour one uniform per susceptible agent for environmental infection, one per
still-susceptible agent for direct infection, and one per agent whose stage
ends, always in ascending agent id. A trajectory is therefore a pure function
of the parameters, the seed, the step limit and the stopping rule.
"""

from dataclasses import dataclass
from enum import IntEnum
from typing import List, Optional

import numpy as np

from .models import EpidemicParams
from .trajectory import COLUMNS, Trajectory


class Status(IntEnum):
    SUSCEPTIBLE = 0
    LATENT = 1
    PRESYMPTOMATIC = 2
    ASYMPTOMATIC = 3
    SYMPTOMATIC = 4
    HOSPITALIZED = 5
    ICU = 6
    RECOVERED = 7
    DEAD = 8


INFECTIOUS = np.array([Status.PRESYMPTOMATIC, Status.ASYMPTOMATIC, Status.SYMPTOMATIC])
IMMOBILE = np.array([Status.HOSPITALIZED, Status.ICU, Status.DEAD])
PROGRESSING = np.array(
    [
        Status.LATENT,
        Status.PRESYMPTOMATIC,
        Status.ASYMPTOMATIC,
        Status.SYMPTOMATIC,
        Status.HOSPITALIZED,
        Status.ICU,
    ]
)

WORK_START_HOUR = 8
WORK_END_HOUR = 18


@dataclass
class Building:
    id: int
    viral_load: float


@dataclass
class AgentState:
    id: int
    status: Status
    stage_hours_left: int
    home: int
    workplace: int


@dataclass(eq=False)
class WorldState:
    """
    Mutable state of one simulation, stored column-wise per agent.

    ``hour`` counts elapsed hours; ``location`` is the building each agent
    currently occupies.
    """

    params: EpidemicParams
    rng: np.random.Generator
    hour: int
    status: np.ndarray
    stage_hours_left: np.ndarray
    home: np.ndarray
    workplace: np.ndarray
    location: np.ndarray
    viral_load: np.ndarray

    @property
    def population(self) -> int:
        return int(self.status.size)

    def agent(self, agent_id: int) -> AgentState:
        return AgentState(
            id=agent_id,
            status=Status(int(self.status[agent_id])),
            stage_hours_left=int(self.stage_hours_left[agent_id]),
            home=int(self.home[agent_id]),
            workplace=int(self.workplace[agent_id]),
        )

    def buildings(self) -> List[Building]:
        return [Building(id=i, viral_load=float(load)) for i, load in enumerate(self.viral_load)]

    def status_counts(self) -> np.ndarray:
        """Number of agents per ``Status``, indexed by status value."""
        return np.bincount(self.status, minlength=len(Status))

    def is_extinct(self) -> bool:
        return not np.isin(self.status, PROGRESSING).any()


def init_world(params: EpidemicParams, seed: int) -> WorldState:
    """
    Creates the initial world of a simulation.

    Args:
        params: Model parameters
        seed: Seed of the simulation generator

    Returns:
        WorldState: Agents with uniformly drawn home and workplace buildings,
        ``initial_infected`` of them latent, and clean buildings
    """
    rng = np.random.Generator(np.random.PCG64(seed))
    population = params.population

    home = rng.integers(0, params.n_buildings, size=population)
    workplace = rng.integers(0, params.n_buildings, size=population)

    status = np.full(population, Status.SUSCEPTIBLE, dtype=np.int8)
    stage_hours_left = np.zeros(population, dtype=np.int32)
    infected = rng.choice(population, size=params.initial_infected, replace=False)
    status[infected] = Status.LATENT
    stage_hours_left[infected] = params.latent_hours

    return WorldState(
        params=params,
        rng=rng,
        hour=0,
        status=status,
        stage_hours_left=stage_hours_left,
        home=home,
        workplace=workplace,
        location=home.copy(),
        viral_load=np.zeros(params.n_buildings, dtype=np.float64),
    )


def move_agents(world: WorldState) -> None:
    """Puts mobile agents at work during working hours and at home otherwise."""
    hour_of_day = world.hour % 24
    target = world.workplace if WORK_START_HOUR <= hour_of_day < WORK_END_HOUR else world.home
    mobile = ~np.isin(world.status, IMMOBILE)
    world.location[mobile] = target[mobile]


def infectious_occupancy(world: WorldState) -> np.ndarray:
    """Number of infectious agents in each building."""
    infectious = np.isin(world.status, INFECTIOUS)
    return np.bincount(world.location[infectious], minlength=world.viral_load.size)


def release_viral_load(world: WorldState, occupancy: np.ndarray) -> None:
    world.viral_load += occupancy * world.params.basic_viral_release


def environmental_infection(world: WorldState) -> np.ndarray:
    """
    Infects susceptible agents through their building's viral load.

    Returns:
        Ids of newly infected agents
    """
    susceptible = np.flatnonzero(world.status == Status.SUSCEPTIBLE)
    load = world.viral_load[world.location[susceptible]]
    probability = np.minimum(1.0, world.params.env_infection_factor * load)
    draws = world.rng.random(susceptible.size)
    return _infect(world, susceptible[draws < probability])


def direct_infection(world: WorldState, occupancy: np.ndarray) -> np.ndarray:
    """
    Infects susceptible agents through infectious co-occupants.

    Returns:
        Ids of newly infected agents
    """
    susceptible = np.flatnonzero(world.status == Status.SUSCEPTIBLE)
    contacts = occupancy[world.location[susceptible]]
    probability = 1.0 - (1.0 - world.params.direct_transmission_prob) ** contacts
    draws = world.rng.random(susceptible.size)
    return _infect(world, susceptible[draws < probability])


def _infect(world: WorldState, agents: np.ndarray) -> np.ndarray:
    world.status[agents] = Status.LATENT
    world.stage_hours_left[agents] = world.params.latent_hours
    return agents


def decay_viral_load(world: WorldState) -> None:
    world.viral_load *= 1.0 - world.params.basic_viral_decrease


def progress_stages(world: WorldState, fresh: Optional[np.ndarray] = None) -> None:
    """
    Counts down stage durations and moves agents whose stage ended.

    Args:
        world: World to update
        fresh: Agents infected during this hour; their countdown starts next hour
    """
    params = world.params
    active = np.isin(world.status, PROGRESSING)
    # agents infected this hour keep their full countdown
    if fresh is not None and fresh.size:
        active[fresh] = False

    world.stage_hours_left[active] -= 1
    ending = np.flatnonzero(active & (world.stage_hours_left <= 0))
    if ending.size == 0:
        return

    # one draw per ending agent, in ascending id order
    draws = world.rng.random(ending.size)
    old = world.status[ending]
    new = old.copy()
    hours = np.zeros(ending.size, dtype=np.int32)

    latent = old == Status.LATENT
    new[latent] = Status.PRESYMPTOMATIC
    hours[latent] = params.presymptomatic_hours

    presymptomatic = old == Status.PRESYMPTOMATIC
    new[presymptomatic] = np.where(
        draws[presymptomatic] < params.p_asymptomatic, Status.ASYMPTOMATIC, Status.SYMPTOMATIC
    )
    hours[presymptomatic] = params.infectious_hours

    new[old == Status.ASYMPTOMATIC] = Status.RECOVERED

    symptomatic = old == Status.SYMPTOMATIC
    hospitalized_now = symptomatic & (draws < params.p_hospitalize)
    new[symptomatic] = Status.RECOVERED
    new[hospitalized_now] = Status.HOSPITALIZED
    hours[hospitalized_now] = params.hospital_hours

    hospitalized = old == Status.HOSPITALIZED
    icu_now = hospitalized & (draws < params.p_icu)
    new[hospitalized] = Status.RECOVERED
    new[icu_now] = Status.ICU
    hours[icu_now] = params.icu_hours

    icu = old == Status.ICU
    new[icu] = np.where(draws[icu] < params.p_die, Status.DEAD, Status.RECOVERED)

    # RECOVERED and DEAD are absorbing
    world.status[ending] = new
    world.stage_hours_left[ending] = hours


def step_hour(world: WorldState) -> WorldState:
    """
    Advances the world by one hour, in place.

    Sub-phases run in a fixed order: mobility, release, environmental
    infection, direct infection, decay, stage progression.

    Args:
        world: World to advance

    Returns:
        WorldState: The same, advanced, world
    """
    move_agents(world)
    occupancy = infectious_occupancy(world)
    release_viral_load(world, occupancy)
    fresh_env = environmental_infection(world)
    fresh_direct = direct_infection(world, occupancy)
    decay_viral_load(world)
    progress_stages(world, np.concatenate([fresh_env, fresh_direct]))
    world.hour += 1
    return world


def indicator_row(world: WorldState, step: int) -> List[int]:
    """Exported indicators of the current state, in ``COLUMNS`` order."""
    counts = world.status_counts()
    return [
        step,
        int(counts[Status.SUSCEPTIBLE]),
        int(counts[Status.RECOVERED]),
        int(counts[Status.PRESYMPTOMATIC]),
        int(counts[Status.ASYMPTOMATIC]),
        int(counts[Status.SYMPTOMATIC]),
        int(counts[Status.HOSPITALIZED]),
        int(counts[Status.ICU]),
        int(counts[Status.DEAD]),
    ]


def run_simulation(
    params: EpidemicParams,
    seed: int,
    final_step: int,
    stop_on_extinction: bool = False,
    task_id: int = 0,
    point_index: int = 0,
) -> Trajectory:
    """
    Runs one simulation and records the indicators after every hour.

    Args:
        params: Model parameters
        seed: Simulation seed
        final_step: Maximum number of hours
        stop_on_extinction: Stop as soon as no agent is infected
        task_id: Task id stored in the trajectory
        point_index: Point index stored in the trajectory

    Returns:
        Trajectory: One row per simulated hour
    """
    world = init_world(params, seed)
    rows = []
    latent = []
    for step in range(final_step):
        step_hour(world)
        rows.append(indicator_row(world, step))
        latent.append(int(world.status_counts()[Status.LATENT]))
        if stop_on_extinction and world.is_extinct():
            break

    return Trajectory(
        task_id=task_id,
        rows=np.asarray(rows, dtype=np.int64).reshape(-1, len(COLUMNS)),
        point_index=point_index,
        latent=np.asarray(latent, dtype=np.int64),
    )
