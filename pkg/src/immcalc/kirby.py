"""Kirby calculus at the level of linking matrices.

A state is a framed link remembered only through its linking matrix, plus a
tally of the CP^2 / -CP^2 summands blown up or down along the way.  Handle
slides are elementary congruences, so every invariant from
:mod:`immcalc.forms` is preserved by construction.
"""

from __future__ import annotations

import re
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

from .forms import (
    CongruenceResult,
    IntegerSymmetricForm,
    SearchBudget,
    congruent,
    direct_sum,
)
from .plumbing import (
    CP2,
    CP2bar,
    DiskBundle,
    EStar,
    Expr,
    SxS,
    SxtS,
    a_chain_or_ball,
    intersection_form,
    parse_expr,
    plumbing,
)


class KirbyError(ValueError):
    pass


@dataclass(frozen=True)
class KirbyState:
    form: IntegerSymmetricForm
    labels: tuple[str, ...] = ()
    ledger: tuple[tuple[str, int], ...] = (("+CP2", 0), ("-CP2", 0))

    def __post_init__(self) -> None:
        if not self.labels and self.form.n:
            object.__setattr__(self, "labels", tuple(f"K{i + 1}" for i in range(self.form.n)))
        if len(self.labels) != self.form.n:
            raise KirbyError("one label per link component is required")

    @classmethod
    def start(cls, form: IntegerSymmetricForm | Expr | str) -> KirbyState:
        return cls(_to_form(form))

    @property
    def stabilizations(self) -> Counter:
        return Counter(dict(self.ledger))

    def _with(self, form, labels, ledger: Counter) -> KirbyState:
        return KirbyState(form, tuple(labels), (("+CP2", ledger["+CP2"]), ("-CP2", ledger["-CP2"])))


def _to_form(x: IntegerSymmetricForm | Expr | str) -> IntegerSymmetricForm:
    if isinstance(x, IntegerSymmetricForm):
        return x
    if isinstance(x, Expr):
        return intersection_form(x)
    text = x.strip()
    if text.startswith("["):
        return IntegerSymmetricForm.parse(text)
    return intersection_form(parse_expr(text))


def blowup(state: KirbyState, eps: int) -> KirbyState:
    """Add an unlinked unknot with framing eps = +-1."""
    if eps not in (1, -1):
        raise KirbyError("blow-up sign must be +1 or -1")
    form = direct_sum(state.form, IntegerSymmetricForm(((eps,),)))
    ledger = state.stabilizations
    ledger["+CP2" if eps == 1 else "-CP2"] += 1
    label = f"{'+' if eps == 1 else '-'}U{sum(ledger.values())}"
    return state._with(form, state.labels + (label,), ledger)


def blowdown(state: KirbyState, k: int) -> KirbyState:
    """Delete component k (1-based); it must be a +-1-framed unknot linking nothing."""
    n = state.form.n
    if not 1 <= k <= n:
        raise KirbyError(f"component {k} out of range 1..{n}")
    i = k - 1
    m = state.form.entries
    blockers = [j + 1 for j in range(n) if j != i and m[i][j] != 0]
    if m[i][i] not in (1, -1) or blockers:
        parts = []
        if m[i][i] not in (1, -1):
            parts.append(f"framing {m[i][i]} is not +-1")
        if blockers:
            parts.append("nonzero linking with " + ", ".join(str(b) for b in blockers))
        raise KirbyError(f"component {k} not unlinked/+-1: " + "; ".join(parts))
    keep = [j for j in range(n) if j != i]
    form = IntegerSymmetricForm(tuple(tuple(m[a][b] for b in keep) for a in keep))
    ledger = state.stabilizations
    ledger["+CP2" if m[i][i] == 1 else "-CP2"] -= 1
    return state._with(form, [state.labels[j] for j in keep], ledger)


def slide(state: KirbyState, i: int, j: int, eps: int) -> KirbyState:
    """Slide handle i over handle j (1-based); e_i <- e_i + eps e_j."""
    n = state.form.n
    if not (1 <= i <= n and 1 <= j <= n):
        raise KirbyError(f"slide indices ({i},{j}) out of range 1..{n}")
    if i == j:
        raise KirbyError("cannot slide a handle over itself")
    if eps not in (1, -1):
        raise KirbyError("slide sign must be +1 or -1")
    a, b = i - 1, j - 1
    rows = [list(r) for r in state.form.entries]
    new_ii = rows[a][a] + 2 * eps * rows[a][b] + rows[b][b]
    for t in range(n):
        if t != a:
            rows[a][t] += eps * rows[b][t]
            rows[t][a] = rows[a][t]
    rows[a][a] = new_ii
    return state._with(IntegerSymmetricForm(rows), state.labels, state.stabilizations)


def permute(state: KirbyState, perm: Sequence[int]) -> KirbyState:
    """Reorder components: new component k is old component perm[k-1] (1-based)."""
    n = state.form.n
    if sorted(perm) != list(range(1, n + 1)):
        raise KirbyError(f"{list(perm)} is not a permutation of 1..{n}")
    idx = [p - 1 for p in perm]
    m = state.form.entries
    form = IntegerSymmetricForm(tuple(tuple(m[a][b] for b in idx) for a in idx))
    return state._with(form, [state.labels[a] for a in idx], state.stabilizations)


def parse_cycles(text: str, n: int) -> list[int]:
    """Cycle notation such as ``(1 2 3)(4 5)`` to the image list used by permute.

    A cycle (a b c) sends component a to position b, b to c and c to a.
    """
    image = list(range(1, n + 1))  # image[old-1] = new position
    text = text.strip()
    if text in ("", "()"):
        return image
    if not re.fullmatch(r"(\(\s*\d+(\s*[ ,]\s*\d+)*\s*\))+", text):
        raise KirbyError(f"bad cycle notation {text!r}")
    for cyc in re.findall(r"\(([^)]*)\)", text):
        elems = [int(x) for x in re.split(r"[\s,]+", cyc.strip()) if x]
        if len(set(elems)) != len(elems) or any(not 1 <= e <= n for e in elems):
            raise KirbyError(f"bad cycle ({cyc})")
        for a, b in zip(elems, elems[1:] + elems[:1]):
            image[a - 1] = b
    if sorted(image) != list(range(1, n + 1)):
        raise KirbyError(f"cycles {text!r} do not define a permutation")
    perm = [0] * n
    for old, new in enumerate(image, start=1):
        perm[new - 1] = old
    return perm


# ---------------------------------------------------------------------------
# scripts


@dataclass
class MoveScript:
    start: str
    moves: list[tuple] = field(default_factory=list)
    expect: str | None = None
    lines: list[int] = field(default_factory=list)

    @classmethod
    def parse(cls, text: str) -> MoveScript:
        start = None
        expect = None
        moves: list[tuple] = []
        lines: list[int] = []
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            word, _, arg = line.partition(" ")
            arg = arg.strip()
            if word == "start":
                start = arg
            elif word == "expect":
                expect = arg
            elif word == "blowup":
                if arg not in ("+1", "-1", "1"):
                    raise KirbyError(f"line {lineno}: blowup takes +1 or -1")
                moves.append(("blowup", int(arg)))
                lines.append(lineno)
            elif word == "blowdown":
                moves.append(("blowdown", _int(arg, lineno)))
                lines.append(lineno)
            elif word == "slide":
                parts = arg.split()
                if len(parts) != 3 or parts[2] not in ("+1", "-1", "1"):
                    raise KirbyError(f"line {lineno}: slide takes <i> <j> <+1|-1>")
                moves.append(("slide", _int(parts[0], lineno), _int(parts[1], lineno), int(parts[2])))
                lines.append(lineno)
            elif word == "permute":
                moves.append(("permute", arg))
                lines.append(lineno)
            else:
                raise KirbyError(f"line {lineno}: unknown directive {word!r}")
        if start is None:
            raise KirbyError("script has no start line")
        return cls(start, moves, expect, lines)

    @classmethod
    def load(cls, path: str | Path) -> MoveScript:
        return cls.parse(Path(path).read_text())


def _int(s: str, lineno: int) -> int:
    try:
        return int(s)
    except ValueError:
        raise KirbyError(f"line {lineno}: expected an integer, got {s!r}") from None


@dataclass
class ScriptResult:
    passed: bool
    trace: list[str]
    step: int | None = None
    reason: str | None = None

    def to_json(self) -> dict:
        out = {"passed": self.passed, "trace": self.trace}
        if not self.passed:
            out.update(step=self.step, reason=self.reason)
        return out


def apply_move(state: KirbyState, move: tuple) -> KirbyState:
    kind = move[0]
    if kind == "blowup":
        return blowup(state, move[1])
    if kind == "blowdown":
        return blowdown(state, move[1])
    if kind == "slide":
        return slide(state, move[1], move[2], move[3])
    if kind == "permute":
        return permute(state, parse_cycles(move[1], state.form.n))
    raise KirbyError(f"unknown move {kind!r}")


def equal_up_to_permutation(a: IntegerSymmetricForm, b: IntegerSymmetricForm) -> bool:
    """Is b = P^T a P for a permutation matrix P?  Small backtracking search."""
    n = a.n
    if n != b.n:
        return False
    if a.entries == b.entries:
        return True
    A, B = a.entries, b.entries
    if sorted(A[i][i] for i in range(n)) != sorted(B[i][i] for i in range(n)):
        return False
    sig_a = [sorted(A[i]) for i in range(n)]
    sig_b = [sorted(B[i]) for i in range(n)]
    assign: list[int] = []
    used = [False] * n

    def extend(k: int) -> bool:
        if k == n:
            return True
        for cand in range(n):
            if used[cand] or sig_a[cand] != sig_b[k]:
                continue
            if all(A[cand][assign[j]] == B[k][j] for j in range(k)):
                used[cand] = True
                assign.append(cand)
                if extend(k + 1):
                    return True
                assign.pop()
                used[cand] = False
        return False

    return extend(0)


def run_script(script: MoveScript | str) -> ScriptResult:
    if isinstance(script, str):
        script = MoveScript.parse(script)
    try:
        state = KirbyState.start(script.start)
    except ValueError as exc:
        return ScriptResult(False, [], 0, f"bad start: {exc}")
    trace = [state.form.literal()]
    for step, move in enumerate(script.moves, start=1):
        try:
            state = apply_move(state, move)
        except KirbyError as exc:
            return ScriptResult(False, trace, step, str(exc))
        trace.append(state.form.literal())
    if script.expect is not None:
        want = _to_form(script.expect)
        if not equal_up_to_permutation(state.form, want):
            return ScriptResult(False, trace, len(script.moves), f"final form {state.form} != expected {want}")
    return ScriptResult(True, trace)


# ---------------------------------------------------------------------------
# the identities used to build singular Seifert surfaces

IDENTITIES = ("A-stable", "A-blowdown", "D-stable", "D-blowdown", "cover-Estar")


def cover_form(n: int) -> IntegerSymmetricForm:
    """Linking matrix of the branched double cover X' of E*_{-n}.

    The 0-framed handle lifts once (it carries the branch locus), the
    (-n-2)-framed handle lifts to two copies.  Each copy links the lifted
    0-handle once; the two copies link each other -2 times, which is the only
    value giving det = 2n = |det(<-2n> + X_n)|.
    """
    d = -n - 2
    return IntegerSymmetricForm(((0, 1, 1), (1, d, -2), (1, -2, d)))


def x_n(n: int) -> Expr:
    """S^2 x S^2 for even n, the twisted bundle for odd n."""
    return Expr((SxS if n % 2 == 0 else SxtS,))


def identity_sides(name: str, n: int, twisted: bool = False) -> tuple[IntegerSymmetricForm, IntegerSymmetricForm, str, str]:
    """Left and right linking matrices (plus readable labels) for an identity."""
    if n < 1:
        raise ValueError("n must be >= 1")
    cp2 = Expr((CP2,))
    ss = Expr((SxtS if twisted else SxS,))
    if name == "A-stable":
        lhs = a_chain_or_ball(n - 1) + ss
        rhs = Expr((DiskBundle(-n),)) + cp2 * n
    elif name == "A-blowdown":
        lhs = Expr((DiskBundle(-n),)) + cp2 * (n - 1)
        rhs = a_chain_or_ball(n - 1) + Expr((CP2bar,))
    elif name == "D-stable":
        lhs = plumbing("D", n + 2) + ss
        rhs = Expr((EStar(n),)) + cp2 * (n + 2)
    elif name == "D-blowdown":
        lhs = Expr((EStar(n),)) + cp2 * (n + 1)
        rhs = plumbing("D", n + 2) + Expr((CP2bar,))
    elif name == "cover-Estar":
        rhs = Expr((DiskBundle(-2 * n),)) + x_n(n)
        return cover_form(n), intersection_form(rhs), f"cover of Estar({n})", str(rhs)
    else:
        raise ValueError(f"unknown identity {name!r}; choose from {', '.join(IDENTITIES)}")
    return intersection_form(lhs), intersection_form(rhs), str(lhs), str(rhs)


def _compare(lhs: IntegerSymmetricForm, rhs: IntegerSymmetricForm) -> dict:
    li, ri = lhs.invariants(), rhs.invariants()
    return {k: {"lhs": li[k], "rhs": ri[k], "match": li[k] == ri[k]} for k in li}


@dataclass
class IdentityReport:
    name: str
    n: int
    lhs: str
    rhs: str
    invariants: dict
    result: CongruenceResult
    twisted: dict | None = None

    @property
    def invariants_match(self) -> bool:
        return all(v["match"] for v in self.invariants.values())

    @property
    def parity_mismatch(self) -> bool:
        return not self.invariants["parity"]["match"]

    @property
    def certified(self) -> bool:
        """The identity holds at form level, literally or in its twisted variant."""
        if self.result.verdict == "yes":
            return True
        return bool(self.twisted and self.twisted["result"].verdict == "yes")

    @property
    def literal_holds(self) -> bool:
        return self.result.verdict == "yes"

    def summary(self) -> str:
        if self.literal_holds:
            return "certified"
        if self.result.verdict == "no":
            msg = f"literal identity fails at form level: {self.result.witness}"
            if self.twisted is not None:
                msg += f"; twisted variant {self.twisted['result'].verdict}"
            return msg
        return "undecided within budget"

    def to_json(self) -> dict:
        out = {
            "identity": self.name,
            "n": self.n,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "invariants": self.invariants,
            "literal": self.result.to_json(),
            "summary": self.summary(),
        }
        if self.twisted is not None:
            out["twisted"] = {
                "lhs": self.twisted["lhs"],
                "rhs": self.twisted["rhs"],
                "invariants": self.twisted["invariants"],
                "result": self.twisted["result"].to_json(),
            }
        return out


def verify_identity(name: str, n: int, budget: SearchBudget | None = None) -> IdentityReport:
    """Compare both sides of a diffeomorphism claim at the level of forms.

    Invariants are compared first; a mismatch (parity, typically) is reported
    as the verdict without running any search.  For the two stable identities
    the variant with the twisted bundle in place of S^2 x S^2 is also tried.
    """
    lhs, rhs, ltxt, rtxt = identity_sides(name, n)
    result = congruent(lhs, rhs, budget)
    report = IdentityReport(name, n, ltxt, rtxt, _compare(lhs, rhs), result)
    if name in ("A-stable", "D-stable"):
        tl, tr, tltxt, trtxt = identity_sides(name, n, twisted=True)
        report.twisted = {
            "lhs": tltxt,
            "rhs": trtxt,
            "invariants": _compare(tl, tr),
            "result": congruent(tl, tr, budget),
        }
    return report


__all__ = [
    "IDENTITIES",
    "IdentityReport",
    "KirbyError",
    "KirbyState",
    "MoveScript",
    "ScriptResult",
    "apply_move",
    "blowdown",
    "blowup",
    "cover_form",
    "equal_up_to_permutation",
    "identity_sides",
    "parse_cycles",
    "permute",
    "run_script",
    "slide",
    "verify_identity",
    "x_n",
]
