"""
Command-line front end.

    python main.py check-frobenius data/z2.json
    python main.py check-datum fibonacci --mode float
    python main.py eval2d --surface "surface_genus(2)" --algebra z3
    python main.py eval3d --manifold s3 --category data/vec_z2.json
    python main.py pachner-fuzz --dim 3 --data vec_z2 --steps 20 --seed 7
    python main.py euler --complex data/punctured_disk.json --weights data/weights.json

Exit status is 0 when every check passes, 1 when a check fails and 2 on bad input.
"""
import argparse
import os
import random
import sys
from dataclasses import dataclass, field as dc_field
from typing import Any, Callable, Dict, List, Optional, Tuple

from core import ioutil, log
from core.errors import CheckFailure, InputError
from core.math import EXACT_MODE, FLOAT_MODE, ScalarField, field_for
from core.report import CheckReport, ConstraintReport
from modules.orbifold2d import frob, tqft2d
from modules.orbifold2d.frob import FrobeniusData
from modules.orbifold3d import fusioncat, statesum3d
from modules.orbifold3d.fusioncat import FusionData
from modules.topology import builtin, euler, mesh
from modules.topology.mesh import Triangulation

logger = log.create_logger(__name__)

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_BAD_INPUT = 2

COMMANDS = ("check-frobenius", "check-datum", "eval2d", "eval3d", "pachner-fuzz", "euler")


@dataclass
class RunConfig:
    """
    Args:
        command: One of COMMANDS
        inputs: Input name -> path or built-in name, e.g. {"algebra": "data/z2.json"}
        mode: exact or float
        tol: Float tolerance; None reads ORBIFOLD_TOLERANCE
        jobs: Worker threads
        output: text or json
        seed: Seed of the fuzzing generator
        steps: Number of random moves
        dim: Dimension for pachner-fuzz
    """
    command: str
    inputs: Dict[str, str] = dc_field(default_factory=dict)
    mode: str = EXACT_MODE
    tol: Optional[float] = None
    jobs: int = 1
    output: str = "text"
    seed: int = 0
    steps: int = 20
    dim: int = 2

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.mode not in (EXACT_MODE, FLOAT_MODE):
            raise InputError(f"mode must be exact or float, got {self.mode!r}")
        if self.mode == FLOAT_MODE and self.tol is not None and not self.tol > 0:
            raise InputError("tolerance must be positive in float mode")
        if self.jobs < 1:
            raise InputError("jobs must be at least 1")
        if self.output not in ("text", "json"):
            raise InputError(f"format must be text or json, got {self.output!r}")
        if self.steps < 0:
            raise InputError("steps must be non-negative")
        if self.dim not in (2, 3):
            raise InputError("dim must be 2 or 3")

    @property
    def field(self) -> ScalarField:
        return field_for(self.mode, self.tol)

    @classmethod
    def from_args(cls, args: argparse.Namespace) -> "RunConfig":
        names = ("algebra", "category", "surface", "manifold", "data", "complex", "weights")
        inputs = {name: getattr(args, name) for name in names if getattr(args, name, None) is not None}
        return cls(args.command, inputs, args.mode, args.tol, args.jobs, args.format,
                   getattr(args, "seed", 0), getattr(args, "steps", 20), getattr(args, "dim", 2))


def _load(source: str) -> Any:
    return ioutil.read_json(source)


def _is_file(source: str) -> bool:
    return source.endswith(".json") or ioutil.file_exists(source)


def load_algebra(source: str, field: ScalarField) -> FrobeniusData:
    """A JSON file, or one of ground, z<N>, s3, matrix<N>."""
    if _is_file(source):
        return frob.from_json(_load(source), field)
    if source == "ground":
        return frob.ground_field(field)
    if source.startswith("z") and source[1:].isdigit():
        return frob.group_algebra(frob.cyclic_group_table(int(source[1:])), field)
    if source == "s3":
        table, names = frob.symmetric_group_table(3)
        return frob.group_algebra(table, field, names=names)
    if source.startswith("matrix") and source[6:].isdigit():
        return frob.matrix_algebra(int(source[6:]), field)
    raise InputError(f"{source!r} is neither a file nor a built-in algebra")


def load_category(source: str, field: ScalarField) -> FusionData:
    """A JSON file, or trivial, vec_z<N>, fibonacci."""
    if _is_file(source):
        return fusioncat.from_json(_load(source), field)
    return fusioncat.builtin_category(source, field=field)


def load_manifold(source: str) -> Triangulation:
    if _is_file(source):
        return mesh.from_json(_load(source))
    return builtin.manifold_from_text(source)


def _scalar(field: ScalarField, value) -> Dict[str, Any]:
    return {"value": field.format(value), "json": field.to_json(value)}


def check_frobenius(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    algebra = load_algebra(config.inputs["algebra"], config.field)
    report = frob.check_frobenius_axioms(algebra, config.tol)
    return _report_status(report), report.to_dict()


def check_datum(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    category = load_category(config.inputs["category"], config.field)
    report = CheckReport(category.field, title="special orbifold datum")
    report.merge(fusioncat.validate_fusion_data(category))
    if report.passed:
        report.merge(fusioncat.check_special_orbifold_datum(category, config.tol, config.jobs))
        report.notes["sqrt_branch"] = fusioncat.SQRT_BRANCH
    return _report_status(report), report.to_dict()


def eval2d(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    surface = load_manifold(config.inputs["surface"])
    algebra = load_algebra(config.inputs["algebra"], config.field)
    if surface.is_closed:
        value = tqft2d.evaluate_closed_2d(surface, algebra)
        return EXIT_OK, dict(_scalar(algebra.field, value), surface=repr(surface))
    matrix = tqft2d.evaluate_bordism_2d(surface, algebra)
    residual = tqft2d.project_bordism(surface, algebra).residual(matrix)
    entries = [[i, j, algebra.field.format(v)] for (i, j), v in sorted(matrix.entries.items())]
    status = EXIT_OK if algebra.field.passes(residual) else EXIT_CHECK_FAILED
    return status, {"shape": list(matrix.shape), "entries": entries, "surface": repr(surface),
                    "projection_residual": float(residual)}


def eval3d(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    manifold = load_manifold(config.inputs["manifold"])
    category = load_category(config.inputs["category"], config.field)
    value = statesum3d.tv_evaluate_closed(manifold, category, config.jobs)
    return EXIT_OK, dict(_scalar(category.field, value), manifold=repr(manifold))


def _closed_evaluator(config: RunConfig) -> Tuple[ScalarField, Callable[[Triangulation], Any]]:
    source = config.inputs["data"]
    if config.dim == 2:
        algebra = load_algebra(source, config.field)
        return algebra.field, lambda tri: tqft2d.evaluate_closed_2d(tri, algebra)
    category = load_category(source, config.field)
    report = fusioncat.check_special_orbifold_datum(category, config.tol, config.jobs)
    if not report.passed:
        raise fusioncat.InvalidFusionData("fusion data fails its constraints", report)
    return category.field, lambda tri: statesum3d.tv_evaluate_closed(tri, category, config.jobs, verify=False)


def pachner_fuzz(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """
    Apply seeded random Pachner moves to a closed complex and compare its value after each
    move with the starting value. The generator is random.Random (Mersenne Twister).
    """
    field, evaluate = _closed_evaluator(config)
    source = config.inputs.get("manifold")
    tri = load_manifold(source) if source else (builtin.sphere2() if config.dim == 2 else builtin.sphere3())
    if tri.dim != config.dim or not tri.is_closed:
        raise InputError(f"fuzzing needs a closed complex of dimension {config.dim}")
    rng = random.Random(config.seed)
    start = evaluate(tri)
    report = ConstraintReport(field, title=f"pachner fuzz {config.dim}d")
    report.declare("invariance")
    moves: List[str] = []
    for step in range(config.steps):
        sites = {kind: mesh.enumerate_oriented_moves(tri, kind) for kind in mesh.KINDS[config.dim]}
        kinds = [kind for kind in mesh.KINDS[config.dim] if sites[kind]]
        kind = rng.choice(kinds)
        site = rng.choice(sites[kind])
        tri = mesh.apply_pachner_move(tri, site)
        name = mesh.variant_name(site.signature)
        moves.append(name)
        report.observe("invariance", field.residual(start, evaluate(tri)), {"step": step, "move": name})
    report.notes.update({"seed": config.seed, "steps": config.steps, "value": field.format(start),
                         "moves": moves, "f_vector": list(tri.f_vector)})
    return _report_status(report), report.to_dict()


def euler_command(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    complex_ = euler.stratified_from_json(_load(config.inputs["complex"]))
    field = config.field
    weights = euler.EulerWeights.from_json(_load(config.inputs["weights"]), field)
    chis, symmetric = euler.euler_characteristics(complex_)
    value = euler.z_euler_evaluate(complex_, weights, field)
    strata = [{"dim": s.dim, "label": s.label, "chi": chi, "chi_tilde": tilde}
              for s, chi, tilde in zip(complex_.strata, chis, symmetric)]
    return EXIT_OK, dict(_scalar(field, value), strata=strata)


HANDLERS: Dict[str, Callable[[RunConfig], Tuple[int, Dict[str, Any]]]] = {
    "check-frobenius": check_frobenius,
    "check-datum": check_datum,
    "eval2d": eval2d,
    "eval3d": eval3d,
    "pachner-fuzz": pachner_fuzz,
    "euler": euler_command,
}

REQUIRED = {
    "check-frobenius": ("algebra",),
    "check-datum": ("category",),
    "eval2d": ("surface", "algebra"),
    "eval3d": ("manifold", "category"),
    "pachner-fuzz": ("data",),
    "euler": ("complex", "weights"),
}


def _report_status(report: CheckReport) -> int:
    return EXIT_OK if report.passed else EXIT_CHECK_FAILED


def run(config: RunConfig) -> Tuple[int, Dict[str, Any]]:
    """
    Execute one command.

    Returns:
        (exit status, result object); input errors and check failures are folded into the
        status and an "error" entry
    """
    missing = [name for name in REQUIRED[config.command] if name not in config.inputs]
    try:
        if missing:
            raise InputError(f"{config.command} needs {', '.join('--' + m for m in missing)}")
        status, result = HANDLERS[config.command](config)
    except CheckFailure as e:
        logger.warning("check failed", command=config.command, error=str(e))
        result = {"error": str(e)}
        if e.report is not None:
            result["report"] = e.report.to_dict()
        return EXIT_CHECK_FAILED, dict(result, command=config.command, passed=False)
    except InputError as e:
        logger.error("bad input", command=config.command, error=str(e))
        return EXIT_BAD_INPUT, {"command": config.command, "error": str(e), "passed": False}
    result.setdefault("passed", status == EXIT_OK)
    result["command"] = config.command
    return status, result


def render(result: Dict[str, Any], output: str) -> str:
    if output == "json":
        return ioutil.dumps_json(result, indent=2)
    if "checks" in result:
        lines = [f"{result['title']}: {'PASS' if result['passed'] else 'FAIL'} "
                 f"(mode={result['mode']}, max residual={result['max_residual']})"]
        for check in result["checks"]:
            line = f"  {'ok  ' if check['passed'] else 'FAIL'} {check['name']:<24} residual={check['residual']}"
            if not check["passed"] and check["witness"]:
                line += f" witness={check['witness']}"
            if check["detail"]:
                line += f" {check['detail']}"
            lines.append(line)
        for key, value in result.get("notes", {}).items():
            lines.append(f"  note {key}: {value}")
        return "\n".join(lines)
    if "error" in result:
        text = f"error: {result['error']}"
        if "report" in result:
            text += "\n" + render(result["report"], output)
        return text
    if "value" in result:
        lines = [result["value"]]
        for stratum in result.get("strata", ()):
            lines.append(f"  {stratum['label']} (dim {stratum['dim']}): chi={stratum['chi']} "
                         f"chi~={stratum['chi_tilde']}")
        return "\n".join(lines)
    return ioutil.dumps_json(result, indent=2)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--mode", choices=(EXACT_MODE, FLOAT_MODE), default=EXACT_MODE)
    common.add_argument("--tol", type=float, default=None, help="float tolerance (default $ORBIFOLD_TOLERANCE or 1e-9)")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--format", choices=("text", "json"), default="text")
    common.add_argument("--verbose", action="store_true", help="debug logging on stderr")
    common.add_argument("--log-dir", default=None)
    common.add_argument("--daily-log", action="store_true")

    parser = argparse.ArgumentParser(prog="pyorbifold", description="Orbifold state sums and their checks")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check-frobenius", parents=[common], help="Frobenius algebra axioms")
    p.add_argument("algebra")
    p = sub.add_parser("check-datum", parents=[common], help="the ten constraints of fusion data")
    p.add_argument("category")
    p = sub.add_parser("eval2d", parents=[common], help="2D state sum of a surface")
    p.add_argument("--surface", required=True)
    p.add_argument("--algebra", required=True)
    p = sub.add_parser("eval3d", parents=[common], help="3D state sum of a closed 3-manifold")
    p.add_argument("--manifold", required=True)
    p.add_argument("--category", required=True)
    p = sub.add_parser("pachner-fuzz", parents=[common], help="random moves preserve the value")
    p.add_argument("--dim", type=int, choices=(2, 3), default=2)
    p.add_argument("--data", required=True)
    p.add_argument("--manifold", default=None)
    p.add_argument("--steps", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p = sub.add_parser("euler", parents=[common], help="Euler characteristics and Euler theory value")
    p.add_argument("--complex", required=True)
    p.add_argument("--weights", required=True)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = "DEBUG" if args.verbose else os.environ.get(log.LEVEL_ENV, "WARNING")
    log.configure(level, args.log_dir, args.daily_log)
    try:
        config = RunConfig.from_args(args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_BAD_INPUT
    status, result = run(config)
    print(render(result, config.output))
    return status


if __name__ == "__main__":
    sys.exit(main())
