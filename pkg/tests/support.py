"""Shared test helpers: seeded program fuzzers and an independent
brute-force kinematics oracle.

The oracle deliberately re-implements execution from scratch (complex-number
arithmetic over plain tuples) so simulator tests compare two genuinely
different derivations of the same semantics.
"""

from __future__ import annotations

import cmath
import math
import random
import string

from rsl import Number, Program, Statement
from rsl.syntax import KEYWORDS, STATEMENT_SCHEMAS

KEYWORD_LIST = sorted(KEYWORDS)
_NAME_ALPHABET = string.ascii_lowercase + "_"
_NAME_CONT = string.ascii_lowercase + string.digits + "_"


def random_number_raw(rng: random.Random, *, allow_nonpositive: bool = False) -> str:
    """A raw numeric literal matching the lexeme rule, positive unless asked."""
    style = rng.randrange(3)
    if style == 0:
        text = str(rng.randint(1, 99))
    elif style == 1:
        text = f"{rng.randint(0, 9)}.{rng.randint(0, 999)}"
    else:
        text = f"{rng.randint(0, 3)}.{rng.randint(1, 99):02d}"
    if allow_nonpositive:
        pick = rng.randrange(4)
        if pick == 0:
            text = "-" + text
        elif pick == 1:
            text = rng.choice(["0", "0.0"])
    elif float(text) == 0.0:
        text = str(rng.randint(1, 9))
    return text


def random_object_name(rng: random.Random) -> str:
    while True:
        name = rng.choice(_NAME_ALPHABET) + "".join(
            rng.choice(_NAME_CONT) for _ in range(rng.randrange(8))
        )
        if name.lower() not in KEYWORDS:
            return name


def random_statement(rng: random.Random) -> Statement:
    keyword = rng.choice(KEYWORD_LIST)
    args: list[Number | str] = []
    for kind in STATEMENT_SCHEMAS[keyword]:
        if kind == "number":
            raw = random_number_raw(rng, allow_nonpositive=(keyword == "goto"))
            args.append(Number(float(raw), raw))
        else:
            args.append(random_object_name(rng))
    return Statement(keyword, tuple(args))


def random_program(rng: random.Random, max_len: int = 6) -> Program:
    count = rng.randint(0, max_len)
    return Program(tuple(random_statement(rng) for _ in range(count)))


def random_junk_source(rng: random.Random) -> str:
    """Adversarial input for totality fuzzing: either raw character noise or
    a soup of plausible and broken lexemes."""
    if rng.random() < 0.5:
        alphabet = (
            string.ascii_letters + string.digits + " \t\n;,./*$-#@\"'(){}[]\\%&!?^~`"
            + "\u00e9\u4e16\x00"
        )
        return "".join(rng.choice(alphabet) for _ in range(rng.randrange(61)))
    pieces = [
        "forward", "FORWARD", "Goto", "goto", "grasp", "perceive", "move",
        "1", "1.5", "-2", "123.23.45", "3apple", "1.", "0", ";", ",",
        "$", "/", "//", "/*", "*/", "/* x */", "// y", "table", "_x9",
        "\n", " ", "\t",
    ]
    return " ".join(rng.choice(pieces) for _ in range(rng.randrange(25)))


def _wrap(theta: float) -> float:
    return math.atan2(math.sin(theta), math.cos(theta))


def oracle_execute(statements, objects, grasp_range=0.5, reach_offset=0.5, start=(0.0, 0.0, 0.0)):
    """Brute-force executor over (keyword, args) tuples.

    args holds floats for numbers and strings for object names. Returns a
    state dict on success or (error_kind_name, executed_count) on failure.
    """
    z = complex(start[0], start[1])
    heading = start[2]
    pan = 0.0
    tilt = 0.0
    held = None
    perceived = False
    executed = 0
    for keyword, args in statements:
        if keyword == "forward":
            z += args[0] * cmath.exp(1j * heading)
        elif keyword == "backward":
            z -= args[0] * cmath.exp(1j * heading)
        elif keyword == "turnleft":
            heading = _wrap(heading + args[0])
        elif keyword == "turnright":
            heading = _wrap(heading - args[0])
        elif keyword == "lookup":
            tilt += args[0]
        elif keyword == "lookdown":
            tilt -= args[0]
        elif keyword == "lookleft":
            pan += args[0]
        elif keyword == "lookright":
            pan -= args[0]
        elif keyword == "perceive":
            perceived = True
        elif keyword == "goto":
            z = complex(args[0], args[1])
        elif keyword == "approach":
            if args[0] not in objects:
                return ("UnknownObject", executed)
            target = complex(*objects[args[0]])
            vector = target - z
            if abs(vector) > 0.0:
                heading = cmath.phase(vector)
            z = target - reach_offset * cmath.exp(1j * heading)
        elif keyword == "grasp":
            if args[0] not in objects:
                return ("UnknownObject", executed)
            if held is not None:
                return ("HandFull", executed)
            if abs(complex(*objects[args[0]]) - z) > grasp_range + 1e-9:
                return ("GraspOutOfRange", executed)
            held = args[0]
        else:
            raise AssertionError(f"oracle got unknown keyword {keyword!r}")
        executed += 1
    return {
        "x": z.real,
        "y": z.imag,
        "heading": heading,
        "cam_pan": pan,
        "cam_tilt": tilt,
        "held": held,
        "perceived": perceived,
        "executed": executed,
    }


def statement_as_tuple(statement: Statement):
    args = tuple(a.value if isinstance(a, Number) else a for a in statement.args)
    return (statement.keyword, args)


def headings_close(a: float, b: float, tol: float = 1e-9) -> bool:
    return abs(_wrap(a - b)) <= tol
