"""LP and free-format MPS writers plus round-trip parsers.

Rationals with a terminating decimal expansion (denominator 2^a 5^b) are
written as the shortest exact decimal.  Anything else is written as a
17-significant-digit decimal together with an `exact` comment carrying
the p/q value; the parsers prefer the comment, so a write/parse round
trip is coefficient-identical either way.  Output is byte-stable for a
fixed model.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Optional, TextIO

from ..errors import ValidationError
from .model import BINARY, CONTINUOUS, INTEGER, MAX, MIN, MilpModel

LP_HEADER = "\\ pwrelax-lp v1"
MPS_HEADER = "* pwrelax-mps v1"


def exact_decimal(fr: Fraction) -> Optional[str]:
    """Shortest exact decimal string, or None when none exists."""
    den = fr.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den != 1:
        return None
    digits = max(twos, fives)
    scaled = fr.numerator * 10 ** digits // fr.denominator
    if digits == 0:
        return str(scaled)
    sign = "-" if scaled < 0 else ""
    body = str(abs(scaled)).rjust(digits + 1, "0")
    whole, frac = body[:-digits], body[-digits:]
    frac = frac.rstrip("0")
    return f"{sign}{whole}.{frac}" if frac else f"{sign}{whole}"


def render_number(fr: Fraction) -> tuple[str, bool]:
    """(token, is_exact); inexact tokens need a companion exact comment."""
    token = exact_decimal(fr)
    if token is not None:
        return token, True
    return repr(float(fr)), False


def parse_number(token: str) -> Fraction:
    if token in ("inf", "+inf", "1e30"):
        raise ValidationError("infinite coefficient")
    if "/" in token:
        return Fraction(token)
    return Fraction(token) if ("." not in token and "e" not in token.lower()) \
        else Fraction(float(token))


class _ExactNotes:
    """Collects `exact` comments so inexact decimals round-trip."""

    def __init__(self):
        self.coef: dict[tuple[str, str], Fraction] = {}
        self.rhs: dict[str, Fraction] = {}
        self.bound: dict[tuple[str, str], Fraction] = {}

    def parse(self, body: str) -> None:
        parts = body.split()
        if not parts:
            return
        if parts[0] == "exact-coef" and len(parts) == 4:
            self.coef[(parts[1], parts[2])] = Fraction(parts[3])
        elif parts[0] == "exact-rhs" and len(parts) == 3:
            self.rhs[parts[1]] = Fraction(parts[2])
        elif parts[0] == "exact-bound" and len(parts) == 4:
            self.bound[(parts[1], parts[2])] = Fraction(parts[3])


def _expr_tokens(coeffs: dict[str, Fraction], notes: list[str],
                 row: str) -> str:
    parts = []
    for var, c in coeffs.items():
        token, ok = render_number(abs(c))
        if not ok:
            notes.append(f"exact-coef {row} {var} {abs(c)}")
        sign = "-" if c < 0 else "+"
        if not parts and sign == "+":
            head = ""
        else:
            head = sign + " "
        mag = "" if abs(c) == 1 else token + " "
        parts.append(f"{head}{mag}{var}")
    return " ".join(parts)


def _rhs_token(value: Fraction, notes: list[str], row: str) -> str:
    token, ok = render_number(value)
    if not ok:
        notes.append(f"exact-rhs {row} {value}")
    return token


def write_lp(model: MilpModel, fh: TextIO) -> None:
    lines = [LP_HEADER, f"\\ name: {model.name}"]
    sense = "Minimize" if model.objective.sense == MIN else "Maximize"
    notes: list[str] = []
    obj = _expr_tokens(model.objective.coeffs, notes, "obj")
    lines.append(sense)
    lines.append(f" obj: {obj}" if obj else " obj:")
    lines.append("Subject To")
    for con in model.constraints.values():
        expr = _expr_tokens(con.coeffs, notes, con.name)
        sense_tok = {"<=": "<=", ">=": ">=", "=": "="}[con.sense]
        rhs = _rhs_token(con.rhs, notes, con.name)
        if not expr:
            expr = "0"
        lines.append(f" {con.name}: {expr} {sense_tok} {rhs}")
    lines.append("Bounds")
    for var in model.variables.values():
        if var.kind == BINARY:
            continue
        lo, hi = var.lb, var.ub
        if lo is None and hi is None:
            lines.append(f" {var.name} free")
            continue
        if lo is not None and hi is not None and lo == hi:
            tok = _bound_token(lo, var.name, "fix", notes)
            lines.append(f" {var.name} = {tok}")
            continue
        lo_tok = "-inf" if lo is None else _bound_token(lo, var.name, "lo", notes)
        hi_tok = "+inf" if hi is None else _bound_token(hi, var.name, "hi", notes)
        lines.append(f" {lo_tok} <= {var.name} <= {hi_tok}")
    binaries = [v.name for v in model.variables.values() if v.kind == BINARY]
    if binaries:
        lines.append("Binary")
        for name in binaries:
            lines.append(f" {name}")
    generals = [v.name for v in model.variables.values() if v.kind == INTEGER]
    if generals:
        lines.append("General")
        for name in generals:
            lines.append(f" {name}")
    if model.sos2_groups:
        lines.append("SOS")
        for group in model.sos2_groups.values():
            members = " ".join(f"{m}:{i + 1}"
                               for i, m in enumerate(group.members))
            lines.append(f" {group.name}: S2:: {members}")
    lines.append("End")
    for note in reversed(notes):
        lines.insert(2, f"\\ {note}")
    fh.write("\n".join(lines) + "\n")


def _bound_token(value: Fraction, var: str, side: str,
                 notes: list[str]) -> str:
    token, ok = render_number(value)
    if not ok:
        notes.append(f"exact-bound {var} {side} {value}")
    return token


def parse_lp(fh: TextIO) -> MilpModel:
    notes = _ExactNotes()
    section = None
    obj_sense = MIN
    obj_line = ""
    con_lines: list[str] = []
    bound_lines: list[str] = []
    binaries: list[str] = []
    generals: list[str] = []
    sos_lines: list[str] = []
    name = "model"
    for raw in fh:
        line = raw.rstrip("\n")
        if line.startswith("\\"):
            body = line[1:].strip()
            if body.startswith("name:"):
                name = body.split(":", 1)[1].strip()
            else:
                notes.parse(body)
            continue
        stripped = line.strip()
        if not stripped:
            continue
        low = stripped.lower()
        if low in ("minimize", "maximize"):
            obj_sense = MIN if low == "minimize" else MAX
            section = "obj"
            continue
        if low == "subject to":
            section = "cons"
            continue
        if low in ("bounds", "binary", "general", "sos", "end"):
            section = low
            continue
        if section == "obj":
            obj_line += " " + stripped
        elif section == "cons":
            con_lines.append(stripped)
        elif section == "bounds":
            bound_lines.append(stripped)
        elif section == "binary":
            binaries.extend(stripped.split())
        elif section == "general":
            generals.extend(stripped.split())
        elif section == "sos":
            sos_lines.append(stripped)

    model = MilpModel(name)
    obj_name, obj_coeffs = _parse_labeled_expr(obj_line, notes, default="obj")
    cons = []
    for text in con_lines:
        cons.append(_parse_constraint(text, notes))

    var_names: dict[str, None] = {}
    for coeffs in [obj_coeffs] + [c[1] for c in cons]:
        for v in coeffs:
            var_names.setdefault(v)
    bounds: dict[str, tuple] = {}
    frees: set[str] = set()
    for text in bound_lines:
        _parse_bound(text, bounds, frees, notes)
        for v in list(bounds) + list(frees):
            var_names.setdefault(v)
    for v in binaries + generals:
        var_names.setdefault(v)
    for text in sos_lines:
        parts = text.split()
        for tok in parts[2:]:
            var_names.setdefault(tok.split(":")[0])

    for v in var_names:
        if v in binaries:
            model.add_var(v, BINARY)
            continue
        kind = INTEGER if v in generals else CONTINUOUS
        if v in frees:
            lo, hi = None, None
        elif v in bounds:
            lo, hi = bounds[v]
        else:
            lo, hi = Fraction(0), None
        model.add_var(v, kind, lo, hi)
    model.set_objective(obj_sense, obj_coeffs)
    for cname, coeffs, sense, rhs in cons:
        model.add_constraint(cname, coeffs, sense, rhs)
    for text in sos_lines:
        head, rest = text.split(":", 1)
        rest = rest.strip()
        if not rest.lower().startswith("s2::"):
            raise ValidationError(f"unsupported SOS line: {text}")
        members = [tok.split(":")[0] for tok in rest[4:].split()]
        model.add_sos2(head.strip(), members)
    return model


def _parse_labeled_expr(text, notes, default):
    text = text.strip()
    if ":" in text:
        label, rest = text.split(":", 1)
        label = label.strip()
    else:
        label, rest = default, text
    return label, _parse_expr(rest, notes, label)


def _parse_expr(text: str, notes: _ExactNotes, row: str) -> dict[str, Fraction]:
    tokens = text.replace("+", " + ").replace("-", " - ").split()
    # repair numbers in scientific notation split on their sign
    merged = []
    i = 0
    while i < len(tokens):
        tok = tokens[i]
        if (tok in "+-" and merged and merged[-1][-1:] in ("e", "E")
                and i + 1 < len(tokens)):
            merged[-1] = merged[-1] + tok + tokens[i + 1]
            i += 2
            continue
        merged.append(tok)
        i += 1
    coeffs: dict[str, Fraction] = {}
    sign = Fraction(1)
    pending: Optional[Fraction] = None
    for tok in merged:
        if tok == "+":
            continue
        if tok == "-":
            sign = -sign
            continue
        if _is_number(tok):
            pending = parse_number(tok)
            continue
        coef = sign * (pending if pending is not None else Fraction(1))
        exact = notes.coef.get((row, tok))
        if exact is not None:
            coef = exact if coef >= 0 else -exact
        coeffs[tok] = coeffs.get(tok, Fraction(0)) + coef
        sign = Fraction(1)
        pending = None
    return coeffs


def _is_number(tok: str) -> bool:
    try:
        float(tok)
        return True
    except ValueError:
        return False


def _parse_constraint(text, notes):
    for sense in ("<=", ">=", "="):
        if f" {sense} " in text:
            left, right = text.rsplit(f" {sense} ", 1)
            name, coeffs = _parse_labeled_expr(left, notes, default="c")
            rhs = notes.rhs.get(name, parse_number(right.strip()))
            return name, coeffs, sense, rhs
    raise ValidationError(f"cannot parse constraint: {text}")


def _parse_bound(text, bounds, frees, notes):
    parts = text.split()
    if len(parts) == 2 and parts[1].lower() == "free":
        frees.add(parts[0])
        return
    if len(parts) == 3 and parts[1] == "=":
        var = parts[0]
        value = notes.bound.get((var, "fix"), parse_number(parts[2]))
        bounds[var] = (value, value)
        return
    if len(parts) == 5 and parts[1] == "<=" and parts[3] == "<=":
        var = parts[2]
        lo = None if parts[0] in ("-inf", "-Inf") else \
            notes.bound.get((var, "lo"), parse_number(parts[0]))
        hi = None if parts[4] in ("+inf", "inf", "Inf") else \
            notes.bound.get((var, "hi"), parse_number(parts[4]))
        bounds[var] = (lo, hi)
        return
    raise ValidationError(f"cannot parse bound: {text}")


# -- MPS ---------------------------------------------------------------


def write_mps(model: MilpModel, fh: TextIO) -> None:
    notes: list[str] = []
    lines = [MPS_HEADER, f"NAME {model.name}", "OBJSENSE",
             " MAX" if model.objective.sense == MAX else " MIN", "ROWS",
             " N obj"]
    for con in model.constraints.values():
        tag = {"<=": "L", ">=": "G", "=": "E"}[con.sense]
        lines.append(f" {tag} {con.name}")
    lines.append("COLUMNS")
    marker = 0
    in_int = False
    for var in model.variables.values():
        is_int = var.kind in (BINARY, INTEGER)
        if is_int and not in_int:
            lines.append(f" M{marker} 'MARKER' 'INTORG'")
            marker += 1
            in_int = True
        elif not is_int and in_int:
            lines.append(f" M{marker} 'MARKER' 'INTEND'")
            marker += 1
            in_int = False
        entries = []
        c = model.objective.coeffs.get(var.name)
        if c is not None:
            entries.append(("obj", c))
        for con in model.constraints.values():
            if var.name in con.coeffs:
                entries.append((con.name, con.coeffs[var.name]))
        if not entries:
            lines.append(f" {var.name} obj 0")
            continue
        for row, c in entries:
            token, ok = render_number(c)
            if not ok:
                notes.append(f"exact-coef {row} {var.name} {c}")
            lines.append(f" {var.name} {row} {token}")
    if in_int:
        lines.append(f" M{marker} 'MARKER' 'INTEND'")
    lines.append("RHS")
    for con in model.constraints.values():
        if con.rhs != 0:
            token, ok = render_number(con.rhs)
            if not ok:
                notes.append(f"exact-rhs {con.name} {con.rhs}")
            lines.append(f" RHS {con.name} {token}")
    lines.append("BOUNDS")
    for var in model.variables.values():
        if var.kind == BINARY:
            lines.append(f" BV BND {var.name}")
            continue
        lo, hi = var.lb, var.ub
        if lo is None and hi is None:
            lines.append(f" FR BND {var.name}")
            continue
        if lo is None:
            lines.append(f" MI BND {var.name}")
        elif lo != 0:
            lines.append(f" LO BND {var.name} "
                         f"{_bound_token(lo, var.name, 'lo', notes)}")
        if hi is not None:
            lines.append(f" UP BND {var.name} "
                         f"{_bound_token(hi, var.name, 'hi', notes)}")
    if model.sos2_groups:
        lines.append("SOS")
        for group in model.sos2_groups.values():
            lines.append(f" S2 {group.name}")
            for i, member in enumerate(group.members):
                lines.append(f"  {member} {i + 1}")
    lines.append("ENDATA")
    for note in reversed(notes):
        lines.insert(1, f"* {note}")
    fh.write("\n".join(lines) + "\n")


def parse_mps(fh: TextIO) -> MilpModel:
    notes = _ExactNotes()
    section = None
    name = "model"
    obj_sense = MIN
    rows: dict[str, str] = {}
    row_order: list[str] = []
    columns: dict[str, list[tuple[str, Fraction]]] = {}
    col_order: list[str] = []
    int_cols: set[str] = set()
    rhs: dict[str, Fraction] = {}
    bounds: dict[str, dict] = {}
    sos_groups: list[tuple[str, list[str]]] = []
    in_int = False
    for raw in fh:
        line = raw.rstrip("\n")
        if line.startswith("*"):
            notes.parse(line[1:].strip())
            continue
        if not line.strip():
            continue
        head = line.split()
        upper = head[0].upper()
        if upper == "NAME":
            name = head[1] if len(head) > 1 else "model"
            continue
        if upper in ("OBJSENSE", "ROWS", "COLUMNS", "RHS", "BOUNDS", "SOS",
                     "ENDATA"):
            section = upper
            continue
        if section == "OBJSENSE":
            obj_sense = MAX if head[0].upper() == "MAX" else MIN
        elif section == "ROWS":
            tag, row = head
            if tag.upper() != "N":
                rows[row] = {"L": "<=", "G": ">=", "E": "="}[tag.upper()]
                row_order.append(row)
        elif section == "COLUMNS":
            if len(head) >= 3 and head[1] == "'MARKER'":
                in_int = head[2] == "'INTORG'"
                continue
            col = head[0]
            if col not in columns:
                columns[col] = []
                col_order.append(col)
                if in_int:
                    int_cols.add(col)
            for i in range(1, len(head) - 1, 2):
                row, token = head[i], head[i + 1]
                value = notes.coef.get((row, col), parse_number(token))
                columns[col].append((row, value))
        elif section == "RHS":
            for i in range(1, len(head) - 1, 2):
                row, token = head[i], head[i + 1]
                rhs[row] = notes.rhs.get(row, parse_number(token))
        elif section == "BOUNDS":
            tag = head[0].upper()
            var = head[2]
            entry = bounds.setdefault(var, {})
            if tag == "BV":
                entry["bv"] = True
            elif tag == "FR":
                entry["lo"], entry["hi"] = None, None
            elif tag == "MI":
                entry["lo"] = None
            elif tag == "LO":
                entry["lo"] = notes.bound.get((var, "lo"),
                                              parse_number(head[3]))
            elif tag == "UP":
                entry["hi"] = notes.bound.get((var, "hi"),
                                              parse_number(head[3]))
            else:
                raise ValidationError(f"unsupported bound tag {tag}")
        elif section == "SOS":
            if head[0].upper() == "S2":
                sos_groups.append((head[1], []))
            else:
                sos_groups[-1][1].append(head[0])

    model = MilpModel(name)
    for colname in col_order:
        entry = bounds.get(colname, {})
        if entry.get("bv"):
            model.add_var(colname, BINARY)
            continue
        kind = INTEGER if colname in int_cols else CONTINUOUS
        lo = entry.get("lo", Fraction(0))
        hi = entry.get("hi", None)
        model.add_var(colname, kind, lo, hi)
    obj_coeffs = {}
    per_row: dict[str, dict[str, Fraction]] = {r: {} for r in row_order}
    for colname in col_order:
        for row, value in columns[colname]:
            if row == "obj":
                if value != 0:
                    obj_coeffs[colname] = value
            else:
                per_row[row][colname] = value
    model.set_objective(obj_sense, obj_coeffs)
    for row in row_order:
        model.add_constraint(row, per_row[row], rows[row],
                             rhs.get(row, Fraction(0)))
    for gname, members in sos_groups:
        model.add_sos2(gname, members)
    return model


def write_lp_file(model: MilpModel, path) -> None:
    with open(path, "w") as fh:
        write_lp(model, fh)


def write_mps_file(model: MilpModel, path) -> None:
    with open(path, "w") as fh:
        write_mps(model, fh)


def parse_lp_file(path) -> MilpModel:
    with open(path) as fh:
        return parse_lp(fh)


def parse_mps_file(path) -> MilpModel:
    with open(path) as fh:
        return parse_mps(fh)
