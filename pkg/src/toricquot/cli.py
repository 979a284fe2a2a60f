"""Command-line front end.

Exit codes: 0 success, 1 mathematical negative, 2 input error,
3 resource or search failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import asdict, dataclass
from typing import Optional

from . import __version__
from .cox import Generator, build_cox, check_generation, check_global_generation, split_torus_factor
from .errors import InputError, NotCartierError, PreconditionError, ResourceError, SearchFailure, ToricError
from .fan import Fan, class_group, local_class_group, rays_span, require_valid, singular_cones, validate_fan
from .lift import ConstructionResult, assemble_construction, construct
from .polyring import default_budget
from .sections import Section, pinned_choice
from .verify import (
    P112_BLOWUP_FAN,
    p112_blowup_sections,
    recertify,
    verify_example_p112_blowup,
    verify_quotient_sampling,
)

log = logging.getLogger("toricquot")

EXIT_OK, EXIT_NEGATIVE, EXIT_INPUT, EXIT_RESOURCE = 0, 1, 2, 3
DEMO_FIELD, DEMO_SAMPLES = 5, 200


@dataclass
class RunConfig:
    command: str
    input: Optional[str] = None
    divisors: Optional[list] = None
    generators: Optional[str] = None
    sections: Optional[str] = None
    seed: int = 0
    coeff_range: int = 3
    max_attempts: int = 50
    field: Optional[int] = None
    samples: int = 200
    out: Optional[str] = None
    json: bool = False
    verbosity: int = 0
    gb_budget: int = 0


def _load_json(text_or_path: str):
    """Inline JSON, or a path to a JSON file."""
    try:
        return json.loads(text_or_path)
    except json.JSONDecodeError:
        pass
    try:
        with open(text_or_path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise InputError(f"cannot read {text_or_path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise InputError(f"{text_or_path} is not valid JSON: {exc}") from exc


def _load_fan(path: str) -> Fan:
    data = _load_json(path)
    if not isinstance(data, dict):
        raise InputError("fan JSON must be an object with rank, rays, max_cones")
    return Fan.from_json(data)


def _parse_divisor(text: str) -> list[int]:
    try:
        value = json.loads(text) if text.strip().startswith("[") else [int(c) for c in text.split(",")]
    except ValueError as exc:
        raise InputError(f"cannot parse divisor {text!r}") from exc
    if not isinstance(value, list) or not all(isinstance(c, int) for c in value):
        raise InputError(f"divisor must be a list of integers, got {text!r}")
    return value


def _parse_sections(data) -> list[list[Section]]:
    if not isinstance(data, list):
        raise InputError("sections must be a list with one list of sections per generator")
    rows = []
    for i, row in enumerate(data):
        out = []
        for s in row:
            try:
                out.append(Section(i, s["points"], s["coeffs"]))
            except (KeyError, TypeError) as exc:
                raise InputError(f"section needs points and coeffs: {exc}") from exc
        rows.append(out)
    return rows


# ---------------------------------------------------------------------------
# commands; each returns (exit code, report dict, human summary lines)


def cmd_validate(cfg: RunConfig):
    F = _load_fan(cfg.input)
    rep = validate_fan(F)
    lines = ["fan is valid" if rep.ok else "fan is invalid"] + [f"  {v}" for v in rep.violations]
    return (EXIT_OK if rep.ok else EXIT_NEGATIVE), rep.to_json(), lines


def cmd_classgroup(cfg: RunConfig):
    F = _load_fan(cfg.input)
    require_valid(F)
    G = class_group(F)
    return EXIT_OK, {"class_group": str(G), "presentation": G.to_json()}, [f"Cl(X) = {G}"]


def cmd_local_classgroups(cfg: RunConfig):
    F = _load_fan(cfg.input)
    require_valid(F)
    rows, lines = [], []
    for c in F.max_cones:
        G = local_class_group(F, c)
        rows.append({"cone": list(c), "rays": [list(F.rays[i]) for i in c], "local_class_group": str(G)})
        lines.append(f"cone {list(c)}: {G}")
    sing = [list(c) for c in singular_cones(F, maximal_only=True)]
    return EXIT_OK, {"cones": rows, "singular_maximal_cones": sing}, lines


def cmd_criterion(cfg: RunConfig):
    F = _load_fan(cfg.input)
    require_valid(F)
    divisors = [F.check_divisor(_parse_divisor(d)) for d in cfg.divisors or []]
    rep = check_generation(F, divisors)
    glob = check_global_generation(F, divisors)
    report = {
        "divisors": [list(d) for d in divisors],
        "generated": rep.ok,
        "global_generated": glob,
        "cones": [c.to_json(F) for c in rep.cones],
        "failing_cones": [{"cone": list(c), "rays": [list(F.rays[i]) for i in c]} for c in rep.failing],
    }
    if rep.ok:
        lines = ["the divisors generate every local class group"]
    else:
        lines = ["the divisors do not generate the local class groups at:"]
        lines += [f"  cone {list(c)} (rays {[list(F.rays[i]) for i in c]})" for c in rep.failing]
    return (EXIT_OK if rep.ok else EXIT_NEGATIVE), report, lines


def cmd_cox(cfg: RunConfig):
    F = _load_fan(cfg.input)
    require_valid(F)
    report = {}
    if not rays_span(F):
        split = split_torus_factor(F)
        report["torus_split"] = split.to_json()
        F = split.factor_fan
    cox = build_cox(F)
    report.update(cox.to_json())
    lines = [f"variables: {', '.join(cox.ring.names)}", f"Cl(X) = {cox.grading}"]
    lines += [f"  deg {n} = {d}" for n, d in zip(cox.ring.names, report["variable_degrees"])]
    return EXIT_OK, report, lines


def _summary(R: ConstructionResult) -> list[str]:
    lines = [f"generators: {[(list(g.divisor), g.n) for g in R.generators]}",
             f"section counts: {R.choice.counts} (attempts {R.choice.attempts})",
             f"G = {' x '.join(f'mu_{n}' for n in R.group.orders) or 'trivial'} (order {R.group.order})"]
    lines += [f"cut: {s} = 0" for s in R.cut_strings()]
    if R.projective:
        lines.append(f"projective model: {len(R.projective.points)} coordinates, "
                     f"form {R.projective.form_string()}")
    return lines


def _sampling(R: ConstructionResult, cfg: RunConfig, report: dict, lines: list[str]) -> bool:
    if cfg.field is None:
        return True
    rep = verify_quotient_sampling(R, cfg.field, cfg.samples, seed=cfg.seed)
    report["sampling"] = rep.to_json()
    lines.append(f"sampling over F_{cfg.field}: {rep.free_orbits}/{rep.used} free orbits, "
                 f"conservation {rep.conservation}, ok {rep.ok}")
    return rep.ok


def cmd_construct(cfg: RunConfig):
    F = _load_fan(cfg.input)
    gens = None
    if cfg.generators:
        gens = _load_json(cfg.generators)
        if not isinstance(gens, list):
            raise InputError("generators must be a list of divisors")
    sections = _parse_sections(_load_json(cfg.sections)) if cfg.sections else None
    R = construct(F, gens, sections, seed=cfg.seed, coeff_range=cfg.coeff_range,
                  max_attempts=cfg.max_attempts, budget=cfg.gb_budget)
    checks = recertify(R, cfg.gb_budget)
    report = R.to_json()
    lines = _summary(R) + [f"smooth U: {checks['smooth_U']}, group action: {checks['group_action']}"]
    ok = checks["smooth_U"] and checks["group_action"] and _sampling(R, cfg, report, lines)
    return (EXIT_OK if ok else EXIT_NEGATIVE), report, lines


def cmd_verify(cfg: RunConfig):
    data = _load_json(cfg.input)
    if isinstance(data, dict) and isinstance(data.get("result"), dict):
        data = data["result"]
    if not isinstance(data, dict) or "choice" not in data:
        raise InputError("expected a construction result JSON")
    R = ConstructionResult.from_json(data)
    checks = recertify(R, cfg.gb_budget)
    report = {"certificates": checks}
    cert_ok = checks["sections"].get("smooth") and checks["sections"].get("snc") and \
        all(checks["sections"].get("misses_Z", []))
    lines = _summary(R) + [f"sections certified: {bool(cert_ok)}", f"smooth U: {checks['smooth_U']}",
                           f"group action: {checks['group_action']}"]
    ok = bool(cert_ok) and checks["smooth_U"] and checks["group_action"]
    ok = _sampling(R, cfg, report, lines) and ok
    return (EXIT_OK if ok else EXIT_NEGATIVE), report, lines


def cmd_demo(cfg: RunConfig):
    if cfg.input != "p112-blowup":
        raise InputError(f"unknown demo {cfg.input!r}; available: p112-blowup")
    rep = verify_example_p112_blowup(field=cfg.field or 0, budget=cfg.gb_budget)
    F = P112_BLOWUP_FAN
    g = Generator.from_json(rep.data["generator"])
    choice = pinned_choice(F, [g], [p112_blowup_sections()], cfg.gb_budget)
    R = assemble_construction(F, [g], choice)
    samp = verify_quotient_sampling(R, DEMO_FIELD, DEMO_SAMPLES, seed=cfg.seed)
    report = rep.to_json()
    report["construction"] = R.to_json()
    report["sampling"] = samp.to_json()
    lines = [f"{'ok  ' if v else 'FAIL'} {k}" for k, v in sorted(rep.checks.items())]
    lines.append(f"sampling over F_{DEMO_FIELD}: {samp.free_orbits}/{samp.used} free orbits of size "
                 f"{samp.group_order}, conservation {samp.conservation}")
    ok = rep.ok and samp.ok
    return (EXIT_OK if ok else EXIT_NEGATIVE), report, lines


COMMANDS = {
    "validate": cmd_validate,
    "classgroup": cmd_classgroup,
    "local-classgroups": cmd_local_classgroups,
    "criterion": cmd_criterion,
    "cox": cmd_cox,
    "construct": cmd_construct,
    "verify": cmd_verify,
    "demo": cmd_demo,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="print the JSON report instead of a summary")
    common.add_argument("--out", help="also write the JSON report to this path")
    common.add_argument("-v", "--verbose", action="count", default=0)

    search = argparse.ArgumentParser(add_help=False)
    search.add_argument("--seed", type=int, default=0)
    search.add_argument("--coeff-range", type=int, default=3)
    search.add_argument("--max-attempts", type=int, default=50)
    search.add_argument("--field", type=int, default=None, help="prime q for finite-field sampling")
    search.add_argument("--samples", type=int, default=200)

    p = argparse.ArgumentParser(prog="toricquot", description="Toric varieties as quotients U/G of smooth varieties.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)
    for name in ("validate", "classgroup", "local-classgroups", "cox"):
        sp = sub.add_parser(name, parents=[common])
        sp.add_argument("input", help="fan JSON file or inline JSON")
    sp = sub.add_parser("criterion", parents=[common])
    sp.add_argument("input")
    sp.add_argument("divisors", nargs="*", help="divisors as 1,1,1,0 or [1,1,1,0]")
    sp = sub.add_parser("construct", parents=[common, search])
    sp.add_argument("input")
    sp.add_argument("--generators", help="JSON list of divisors (inline or file)")
    sp.add_argument("--sections", help="JSON list of section lists (inline or file)")
    sp = sub.add_parser("verify", parents=[common, search])
    sp.add_argument("input", help="construction result JSON")
    sp = sub.add_parser("demo", parents=[common, search])
    sp.add_argument("input", metavar="name", help="p112-blowup")
    return p


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        input=args.input,
        divisors=getattr(args, "divisors", None),
        generators=getattr(args, "generators", None),
        sections=getattr(args, "sections", None),
        seed=getattr(args, "seed", 0),
        coeff_range=getattr(args, "coeff_range", 3),
        max_attempts=getattr(args, "max_attempts", 50),
        field=getattr(args, "field", None),
        samples=getattr(args, "samples", 200),
        out=args.out,
        json=args.json,
        verbosity=args.verbose,
        gb_budget=default_budget(),
    )


def run(cfg: RunConfig) -> tuple[int, dict, list[str]]:
    try:
        code, result, lines = COMMANDS[cfg.command](cfg)
    except SearchFailure as exc:
        code, result, lines = EXIT_RESOURCE, {"error": str(exc), "last_certificates": exc.last_certificates}, [str(exc)]
    except ResourceError as exc:
        code, result, lines = EXIT_RESOURCE, {"error": str(exc)}, [str(exc)]
    except InputError as exc:
        code, result, lines = EXIT_INPUT, {"error": str(exc)}, [f"input error: {exc}"]
    except ToricError as exc:
        code = EXIT_NEGATIVE if isinstance(exc, (PreconditionError, NotCartierError)) else EXIT_INPUT
        result, lines = {"error": str(exc), "kind": type(exc).__name__}, [f"{type(exc).__name__}: {exc}"]
    report = {"version": __version__, "config": asdict(cfg), "exit_code": code, "result": result}
    return code, report, lines


def main(argv: Optional[list[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    cfg = config_from_args(args)
    logging.basicConfig(level=logging.WARNING - 10 * min(cfg.verbosity, 2), format="%(levelname)s %(message)s")
    code, report, lines = run(cfg)
    text = json.dumps(report, sort_keys=True, indent=2, default=str)
    if cfg.out:
        with open(cfg.out, "w") as fh:
            fh.write(text + "\n")
    if cfg.json:
        print(text)
    else:
        print("\n".join(lines))
    return code


if __name__ == "__main__":
    sys.exit(main())
