"""3x3 two-color board engine.

Cells hold Red, Blue or nothing; no two orthogonally adjacent cells may share
a color, which leaves exactly two valid completions (checkerboards keyed by
the center color). The first placed block fixes which of the two the session
is building toward. Deliberately wrong placements are allowed behind a flag
and tag the board until a corrective removal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

SIZE = 3
CELLS = [(r, c) for r in range(SIZE) for c in range(SIZE)]


class Color(enum.Enum):
    RED = "R"
    BLUE = "B"

    @property
    def opposite(self) -> "Color":
        return Color.BLUE if self is Color.RED else Color.RED


class CenterColor(enum.Enum):
    RED = "R"
    BLUE = "B"
    UNKNOWN = "?"


class CellOccupied(ValueError):
    pass


class CellEmpty(ValueError):
    pass


class IllegalPlacement(ValueError):
    pass


class Inconsistent(ValueError):
    """Occupied cells do not agree on a single target configuration."""


@dataclass(frozen=True)
class Board:
    cells: tuple = tuple([None] * 9)          # row-major Color | None
    misplaced: frozenset = field(default_factory=frozenset)  # indices placed wrong on purpose

    def at(self, cell: tuple[int, int]):
        return self.cells[_index(cell)]

    @property
    def has_misplacement(self) -> bool:
        return bool(self.misplaced)

    def empty_cells(self) -> list[tuple[int, int]]:
        return [cell for cell in CELLS if self.at(cell) is None]

    def count(self, color: Color) -> int:
        return sum(1 for c in self.cells if c is color)

    def serialize(self) -> str:
        return "".join("." if c is None else c.value for c in self.cells)

    @classmethod
    def deserialize(cls, s: str) -> "Board":
        if len(s) != 9 or set(s) - {".", "R", "B"}:
            raise ValueError(f"bad board string '{s}'")
        cells = tuple(None if ch == "." else Color(ch) for ch in s)
        return cls(cells)


def _index(cell: tuple[int, int]) -> int:
    r, c = cell
    if not (0 <= r < SIZE and 0 <= c < SIZE):
        raise ValueError(f"cell {cell} off the board")
    return r * SIZE + c


def new_board() -> Board:
    return Board()


def cell_parity_color(cell: tuple[int, int], center: Color) -> Color:
    """The color a cell must hold in the completion whose center is `center`."""
    r, c = cell
    return center if (r + c) % 2 == 0 else center.opposite


def infer_target(b: Board) -> CenterColor:
    """Deduce the target completion from correctly-placed blocks.

    Cells tagged as misplacements are ignored: they contradict the target by
    construction.
    """
    center: Color | None = None
    for cell in CELLS:
        color = b.at(cell)
        if color is None or _index(cell) in b.misplaced:
            continue
        implied = color if (cell[0] + cell[1]) % 2 == 0 else color.opposite
        if center is None:
            center = implied
        elif center is not implied:
            raise Inconsistent(
                f"cell {cell} implies center {implied.value}, earlier cells imply {center.value}"
            )
    if center is None:
        return CenterColor.UNKNOWN
    return CenterColor(center.value)


def apply_move(b: Board, cell: tuple[int, int], color: Color, allow_wrong: bool = False) -> Board:
    """Place a block; legal placements must match the inferred target."""
    idx = _index(cell)
    if b.cells[idx] is not None:
        raise CellOccupied(f"cell {cell} is occupied")
    target = infer_target(b)
    consistent = (
        target is CenterColor.UNKNOWN
        or cell_parity_color(cell, Color(target.value)) is color
    )
    if not allow_wrong and not consistent:
        raise IllegalPlacement(f"{color.value} at {cell} contradicts center {target.value}")
    cells = list(b.cells)
    cells[idx] = color
    misplaced = set(b.misplaced)
    if allow_wrong and not consistent:
        misplaced.add(idx)
    return Board(tuple(cells), frozenset(misplaced))


def remove_block(b: Board, cell: tuple[int, int]) -> Board:
    idx = _index(cell)
    if b.cells[idx] is None:
        raise CellEmpty(f"cell {cell} is already empty")
    cells = list(b.cells)
    cells[idx] = None
    return Board(tuple(cells), b.misplaced - {idx})


def is_complete_valid(b: Board) -> bool:
    """Full board with no orthogonally adjacent same-color pair."""
    if any(c is None for c in b.cells):
        return False
    for r, c in CELLS:
        for dr, dc in ((0, 1), (1, 0)):
            rr, cc = r + dr, c + dc
            if rr < SIZE and cc < SIZE and b.at((r, c)) is b.at((rr, cc)):
                return False
    return True


def enumerate_valid_full_boards() -> set[Board]:
    """Brute force: test all 512 two-colorings against the adjacency rule.

    Checks adjacency inline so this stays an oracle independent of
    is_complete_valid.
    """
    out = set()
    for mask in range(2 ** 9):
        bits = [(mask >> i) & 1 for i in range(9)]
        ok = True
        for r in range(SIZE):
            for c in range(SIZE):
                if c + 1 < SIZE and bits[r * SIZE + c] == bits[r * SIZE + c + 1]:
                    ok = False
                if r + 1 < SIZE and bits[r * SIZE + c] == bits[(r + 1) * SIZE + c]:
                    ok = False
        if ok:
            cells = tuple(Color.RED if bit else Color.BLUE for bit in bits)
            out.add(Board(cells))
    return out
