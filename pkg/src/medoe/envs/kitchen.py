"""Two-cook kitchen on a 7x5 grid split by a central counter column.

Coordinates are (x, y) with y increasing upward. Counters are the perimeter
plus the column x=3, y in 1..3; the walkable halves are x in {1,2} and
x in {4,5}, y in 1..3, so the cooks can never swap sides and hand items over
the central column. One tomato, one plate, a chopping board and a delivery
star exist per episode. Moving turns the agent to face the direction and
advances when the cell is walkable and free; interact picks up or puts down
on the faced counter; chop works on a tomato lying on the board. Placing a
chopped tomato on the plate (or the plate onto a chopped tomato) combines
them into a dish; placing the dish on the star delivers it.

Episodes end on the variant's final event (delivery, or plating for the
chop-side source) or at the horizon. Each reward fires at most once per
episode. Agents act sequentially within a step, lower index first, so a
vacated cell can be entered in the same step. All transition randomness sits
in reset; steps are deterministic given actions.
"""

from dataclasses import dataclass, field

import numpy as np

from medoe.envs.base import ConfigError, StepResult, TaskSpec

WIDTH = 7
HEIGHT = 5

UP, DOWN, LEFT, RIGHT = 0, 1, 2, 3
DIR_VECS = ((0, 1), (0, -1), (-1, 0), (1, 0))

A_UP, A_DOWN, A_LEFT, A_RIGHT, A_NOOP, A_INTERACT, A_CHOP = range(7)
NUM_ACTIONS = 7
OBS_DIM = 21

WALKABLE_LEFT = frozenset((x, y) for x in (1, 2) for y in (1, 2, 3))
WALKABLE_RIGHT = frozenset((x, y) for x in (4, 5) for y in (1, 2, 3))
WALKABLE = WALKABLE_LEFT | WALKABLE_RIGHT

COUNTERS = frozenset(
    {(x, y) for x in range(WIDTH) for y in range(HEIGHT) if x in (0, WIDTH - 1) or y in (0, HEIGHT - 1)}
    | {(3, y) for y in (1, 2, 3)}
)

# spawn candidate cells; every cell is faceable from the half that needs it
PLATE_CELLS = ((0, 1), (1, 0), (2, 0))
STAR_CELLS = ((4, 4), (5, 4), (6, 3))
BOARD_CELLS = ((0, 1), (0, 2), (0, 3))
CENTRAL_CELLS = ((3, 1), (3, 2), (3, 3))
TOMATO_WALL_CELLS = ((6, 1), (6, 2), (6, 3))

HANDOFF_ORDER = ((3, 2), (3, 1), (3, 3))

REWARDS = {
    "target": {"chop": 0.267, "plate": 0.267, "deliver": 0.476},
    "left": {"chop": 0.5, "plate": 0.5},
    "right": {"deliver": 1.0},
}
FINAL_EVENT = {"target": "deliver", "left": "plate", "right": "deliver"}

VARIANTS = ("target", "left", "right")


@dataclass(frozen=True)
class KitchenTask:
    spec: TaskSpec
    variant: str


def make_kitchen_task(variant, horizon=100):
    if variant not in VARIANTS:
        raise ConfigError(f"unknown kitchen variant: {variant}")
    spec = TaskSpec(
        task_id=f"overcooked-{variant}",
        num_agents=2,
        num_actions=NUM_ACTIONS,
        obs_dim=OBS_DIM,
        horizon=horizon,
    )
    return KitchenTask(spec=spec, variant=variant)


@dataclass
class KitchenState:
    variant: str
    pos: list                 # two (x, y) tuples
    orient: list              # two direction ints
    held: list                # two of "", "tomato", "plate", "dish"
    tomato_cell: tuple | None
    plate_cell: tuple | None  # the dish sits at the plate location once combined
    chopped: bool
    combined: bool
    board_cell: tuple
    star_cell: tuple
    steps: int = 0
    fired: set = field(default_factory=set)

    def copy(self):
        return KitchenState(
            variant=self.variant,
            pos=list(self.pos),
            orient=list(self.orient),
            held=list(self.held),
            tomato_cell=self.tomato_cell,
            plate_cell=self.plate_cell,
            chopped=self.chopped,
            combined=self.combined,
            board_cell=self.board_cell,
            star_cell=self.star_cell,
            steps=self.steps,
            fired=set(self.fired),
        )

    def tomato_xy(self):
        if self.combined:
            return self.plate_xy()
        for i in (0, 1):
            if self.held[i] == "tomato":
                return self.pos[i]
        return self.tomato_cell

    def plate_xy(self):
        for i in (0, 1):
            if self.held[i] in ("plate", "dish"):
                return self.pos[i]
        return self.plate_cell


def _faceable_from(half, cell):
    return any((cell[0] + dx, cell[1] + dy) in half for dx, dy in DIR_VECS)


def _draw_cell(rng, candidates, exclude=()):
    free = [c for c in candidates if c not in exclude]
    return free[int(rng.integers(len(free)))]


def reset_kitchen(variant, rng):
    """Fresh episode state. Draw order is fixed: agent side, then the item,
    board, tomato and star cells that the variant needs, each uniform over
    its unoccupied candidates."""
    if variant not in VARIANTS:
        raise ConfigError(f"unknown kitchen variant: {variant}")
    left_first = rng.random() < 0.5
    pos = [(1, 2), (5, 2)] if left_first else [(5, 2), (1, 2)]
    orient = [RIGHT, LEFT] if left_first else [LEFT, RIGHT]

    if variant == "right":
        plate_cell = _draw_cell(rng, CENTRAL_CELLS)
        board_cell = _draw_cell(rng, BOARD_CELLS)
        star_cell = _draw_cell(rng, STAR_CELLS)
        tomato_cell = plate_cell
        chopped = True
        combined = True
    else:
        plate_cell = _draw_cell(rng, PLATE_CELLS)
        board_cell = _draw_cell(rng, BOARD_CELLS, exclude=(plate_cell,))
        tomato_source = TOMATO_WALL_CELLS if variant == "target" else CENTRAL_CELLS
        tomato_cell = _draw_cell(rng, tomato_source)
        star_cell = _draw_cell(rng, STAR_CELLS, exclude=(tomato_cell,))
        chopped = False
        combined = False

    for cell, half in ((plate_cell, WALKABLE_LEFT if variant != "right" else WALKABLE_RIGHT),
                       (board_cell, WALKABLE_LEFT),
                       (star_cell, WALKABLE_RIGHT)):
        if not _faceable_from(half, cell):
            raise ConfigError(f"spawn cell {cell} is not reachable")

    return KitchenState(
        variant=variant,
        pos=pos,
        orient=orient,
        held=["", ""],
        tomato_cell=tomato_cell,
        plate_cell=plate_cell,
        chopped=chopped,
        combined=combined,
        board_cell=board_cell,
        star_cell=star_cell,
    )


def _object_cells(state):
    cells = set()
    if state.tomato_cell is not None and not state.combined:
        cells.add(state.tomato_cell)
    if state.plate_cell is not None:
        cells.add(state.plate_cell)
    return cells


def _fire(state, event, rewards):
    if event in state.fired:
        return 0.0
    state.fired.add(event)
    return rewards.get(event, 0.0)


def _interact(state, i, rewards):
    x, y = state.pos[i]
    dx, dy = DIR_VECS[state.orient[i]]
    faced = (x + dx, y + dy)
    if faced not in COUNTERS:
        return 0.0
    held = state.held[i]
    dish_here = state.combined and state.plate_cell == faced
    tomato_here = (not state.combined) and state.tomato_cell == faced
    plate_here = (not state.combined) and state.plate_cell == faced
    if held == "":
        if dish_here:
            state.held[i] = "dish"
            state.plate_cell = None
            state.tomato_cell = None
        elif tomato_here:
            state.held[i] = "tomato"
            state.tomato_cell = None
        elif plate_here:
            state.held[i] = "plate"
            state.plate_cell = None
        return 0.0
    occupied = faced in _object_cells(state)
    if held == "dish":
        if not occupied:
            state.held[i] = ""
            state.plate_cell = faced
            state.tomato_cell = faced
            if faced == state.star_cell:
                return _fire(state, "deliver", rewards)
        return 0.0
    if held == "tomato":
        if not occupied:
            state.held[i] = ""
            state.tomato_cell = faced
        elif plate_here and state.chopped:
            state.held[i] = ""
            state.combined = True
            state.tomato_cell = faced
            return _fire(state, "plate", rewards)
        return 0.0
    if held == "plate":
        if not occupied:
            state.held[i] = ""
            state.plate_cell = faced
        elif tomato_here and state.chopped:
            state.held[i] = ""
            state.combined = True
            state.plate_cell = faced
            state.tomato_cell = faced
            return _fire(state, "plate", rewards)
        return 0.0
    return 0.0


def _chop(state, i, rewards):
    x, y = state.pos[i]
    dx, dy = DIR_VECS[state.orient[i]]
    faced = (x + dx, y + dy)
    if (
        faced == state.board_cell
        and not state.combined
        and not state.chopped
        and state.tomato_cell == faced
    ):
        state.chopped = True
        return _fire(state, "chop", rewards)
    return 0.0


def kitchen_step(state, actions):
    """Advance one joint step in place; returns (team reward, done)."""
    rewards = REWARDS[state.variant]
    reward = 0.0
    for i in (0, 1):
        a = actions[i]
        if a in (A_UP, A_DOWN, A_LEFT, A_RIGHT):
            state.orient[i] = a
            dx, dy = DIR_VECS[a]
            nxt = (state.pos[i][0] + dx, state.pos[i][1] + dy)
            if nxt in WALKABLE and nxt != state.pos[1 - i]:
                state.pos[i] = nxt
        elif a == A_INTERACT:
            reward += _interact(state, i, rewards)
        elif a == A_CHOP:
            reward += _chop(state, i, rewards)
        elif a != A_NOOP:
            raise ConfigError(f"bad kitchen action: {a}")
    state.steps += 1
    done = FINAL_EVENT[state.variant] in state.fired
    return reward, done


def encode_observation(state, i):
    """21-dim egocentric view; positions normalized by the grid extents,
    carried items report the carrier's cell."""
    out = np.zeros(OBS_DIM, dtype=np.float64)
    ex, ey = state.pos[i]
    ox, oy = state.pos[1 - i]
    wx, wy = WIDTH - 1.0, HEIGHT - 1.0
    out[0] = ex / wx
    out[1] = ey / wy
    out[2 + state.orient[i]] = 1.0
    out[6] = (ox - ex) / wx
    out[7] = (oy - ey) / wy
    out[8 + state.orient[1 - i]] = 1.0
    tx, ty = state.tomato_xy()
    out[12] = (tx - ex) / wx
    out[13] = (ty - ey) / wy
    out[14] = 1.0 if state.chopped else 0.0
    px, py = state.plate_xy()
    out[15] = (px - ex) / wx
    out[16] = (py - ey) / wy
    out[17] = (state.board_cell[0] - ex) / wx
    out[18] = (state.board_cell[1] - ey) / wy
    out[19] = (state.star_cell[0] - ex) / wx
    out[20] = (state.star_cell[1] - ey) / wy
    return out


def expert_doe_kitchen(role, state):
    """1 when the situation lies inside the role's source distribution."""
    tx, _ = state.tomato_xy()
    px, _ = state.plate_xy()
    if role == "left":
        return 1.0 if (tx <= 3 and px <= 3 and not state.combined) else 0.0
    if role == "right":
        return 1.0 if (state.chopped and state.combined and px >= 3) else 0.0
    raise ConfigError(f"unknown kitchen role: {role}")


# ── scripted reference play ──

def _neighbors(cell):
    return [(cell[0] + dx, cell[1] + dy) for dx, dy in DIR_VECS]


def _dir_toward(src, dst):
    for d, (dx, dy) in enumerate(DIR_VECS):
        if (src[0] + dx, src[1] + dy) == dst:
            return d
    return None


def _next_hop(start, targets, half, blocked):
    """First move direction of a shortest path to any target cell, searching
    in fixed direction order so ties break deterministically."""
    if start in targets:
        return None
    frontier = [start]
    parent = {start: None}
    while frontier:
        nxt = []
        for cell in frontier:
            for d, (dx, dy) in enumerate(DIR_VECS):
                cand = (cell[0] + dx, cell[1] + dy)
                if cand in parent or cand not in half or cand in blocked:
                    continue
                parent[cand] = (cell, d)
                if cand in targets:
                    # unwind to the first hop
                    cur = cand
                    while parent[cur][0] != start:
                        cur = parent[cur][0]
                    return parent[cur][1]
                nxt.append(cand)
        frontier = nxt
    return None


def _goto_and(state, i, cell, action, half):
    """Walk adjacent to `cell`, face it, then run `action`."""
    pos = state.pos[i]
    adj = set(_neighbors(cell)) & half
    if not adj:
        return A_NOOP
    if pos in adj:
        d = _dir_toward(pos, cell)
        if state.orient[i] == d:
            return action
        return d  # direction actions double as turns; the counter blocks the move
    hop = _next_hop(pos, adj, half, {state.pos[1 - i]})
    return A_NOOP if hop is None else hop


def _free_handoff_cell(state):
    taken = _object_cells(state)
    for cell in HANDOFF_ORDER:
        if cell not in taken:
            return cell
    return HANDOFF_ORDER[0]


def _reachable(cell, half):
    return cell is not None and _faceable_from(half, cell)


def scripted_action(state, i):
    """Deterministic optimal-play action for agent i given its current side."""
    side_left = state.pos[i][0] <= 2
    half = WALKABLE_LEFT if side_left else WALKABLE_RIGHT
    held = state.held[i]
    if side_left:
        if state.variant == "right":
            return A_NOOP
        if not state.chopped:
            if held == "tomato":
                return _goto_and(state, i, state.board_cell, A_INTERACT, half)
            if state.tomato_cell == state.board_cell:
                return _goto_and(state, i, state.board_cell, A_CHOP, half)
            if not state.combined and state.tomato_cell is not None and _reachable(state.tomato_cell, half):
                return _goto_and(state, i, state.tomato_cell, A_INTERACT, half)
            return A_NOOP
        if not state.combined:
            if held == "tomato":
                if state.plate_cell is None:
                    return A_NOOP
                return _goto_and(state, i, state.plate_cell, A_INTERACT, half)
            if state.tomato_cell is not None and _reachable(state.tomato_cell, half):
                return _goto_and(state, i, state.tomato_cell, A_INTERACT, half)
            return A_NOOP
        if state.variant == "left":
            return A_NOOP
        if held == "dish":
            return _goto_and(state, i, _free_handoff_cell(state), A_INTERACT, half)
        dish = state.plate_cell
        if dish is not None and dish[0] < 3 and _reachable(dish, half):
            return _goto_and(state, i, dish, A_INTERACT, half)
        return A_NOOP
    # right side
    if state.variant == "left":
        return A_NOOP
    if not state.combined:
        if held == "tomato":
            return _goto_and(state, i, _free_handoff_cell(state), A_INTERACT, half)
        if state.tomato_cell is not None and state.tomato_cell[0] > 3 and _reachable(state.tomato_cell, half):
            return _goto_and(state, i, state.tomato_cell, A_INTERACT, half)
        return A_NOOP
    if held == "dish":
        return _goto_and(state, i, state.star_cell, A_INTERACT, half)
    dish = state.plate_cell
    if dish is not None and dish[0] >= 3 and _reachable(dish, half):
        return _goto_and(state, i, dish, A_INTERACT, half)
    return A_NOOP


def render_kitchen(state):
    """ASCII picture, y drawn top-down."""
    grid = [[" "] * WIDTH for _ in range(HEIGHT)]
    for x, y in COUNTERS:
        grid[y][x] = "#"
    if state.board_cell:
        grid[state.board_cell[1]][state.board_cell[0]] = "B"
    if state.star_cell:
        grid[state.star_cell[1]][state.star_cell[0]] = "*"
    if state.plate_cell is not None:
        grid[state.plate_cell[1]][state.plate_cell[0]] = "D" if state.combined else "P"
    if not state.combined and state.tomato_cell is not None:
        grid[state.tomato_cell[1]][state.tomato_cell[0]] = "t" if not state.chopped else "c"
    arrows = {UP: "^", DOWN: "v", LEFT: "<", RIGHT: ">"}
    for i in (0, 1):
        x, y = state.pos[i]
        grid[y][x] = arrows[state.orient[i]]
    lines = ["".join(row) for row in reversed(grid)]
    held = ", ".join(h if h else "-" for h in state.held)
    flags = f"chopped={state.chopped} combined={state.combined} fired={sorted(state.fired)}"
    return "\n".join(lines) + f"\nheld: {held}\n{flags}\n"


class KitchenVecEnv:
    """num_envs independent kitchens with per-copy reset streams."""

    def __init__(self, task, num_envs, streams):
        if len(streams) != num_envs:
            raise ConfigError("need one rng stream per env copy")
        self.task = task
        self.num_envs = num_envs
        self.streams = streams
        self.kitchens = [reset_kitchen(task.variant, g) for g in streams]

    @property
    def num_agents(self):
        return 2

    def observations(self):
        obs = [np.empty((self.num_envs, OBS_DIM)) for _ in range(2)]
        for e, st in enumerate(self.kitchens):
            for i in (0, 1):
                obs[i][e] = encode_observation(st, i)
        return obs

    def tab_ids(self):
        return None

    def states_view(self):
        return [st.copy() for st in self.kitchens]

    def begin_step(self):
        block = np.empty((self.num_envs, 2), dtype=np.float64)
        for e, g in enumerate(self.streams):
            block[e] = g.random(2)
        return block

    def step(self, actions):
        actions = np.asarray(actions)
        E = self.num_envs
        rewards = np.zeros(E)
        done8 = np.zeros(E, dtype=np.uint8)
        trunc8 = np.zeros(E, dtype=np.uint8)
        next_obs = [np.empty((E, OBS_DIM)) for _ in range(2)]
        horizon = self.task.spec.horizon
        for e, st in enumerate(self.kitchens):
            r, done = kitchen_step(st, (int(actions[0, e]), int(actions[1, e])))
            rewards[e] = r
            done8[e] = 1 if done else 0
            trunc8[e] = 1 if (not done and st.steps >= horizon) else 0
            for i in (0, 1):
                next_obs[i][e] = encode_observation(st, i)
            if done8[e] or trunc8[e]:
                self.kitchens[e] = reset_kitchen(self.task.variant, self.streams[e])
        return StepResult(
            rewards=rewards,
            done=done8,
            truncated=trunc8,
            next_obs=next_obs,
            next_tab_ids=None,
        )
