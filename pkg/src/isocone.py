"""
isocone.py - Command-Line Interface

Usage:
    python src/isocone.py [--config PATH] [--verbose] COMMAND ...

Commands:
    construct {orthant,extremal,monotone,isotonic}   emit a ProblemDocument
    analyze DOCUMENT                                 isotonic projection report
    project DOCUMENT --point=X                       metric projection
    isoreg GRAPH_DOCUMENT --y=Y [--weights=W]        weighted isotonic regression
    falsify DOCUMENT [--order orthant|cone]          seeded counterexample search

Vectors are comma-separated reals; write negative leading values as
--point=-1,2 so they are not read as options. Results are JSON on standard
output, diagnostics go to standard error.

Exit status: 0 success (false verdicts included), 1 usage error,
2 input or parse error, 3 numerical failure or exceeded cap.
"""

import argparse
import importlib
import json
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from errors import (
    ConvergenceError,
    DegenerateProjectionError,
    DimensionMismatchError,
    ExactGeometryCapError,
    InvalidInputError,
    NumericalError,
)


cone_model = importlib.import_module("cone-model")
solver_config = importlib.import_module("solver-config")
problem_document = importlib.import_module("problem-document")
analysis = importlib.import_module("analysis")
solvers = importlib.import_module("solvers")

logger = logging.getLogger("isocone")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_INPUT = 2
EXIT_NUMERICAL = 3


class IsoconeArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_vector(text: str, name: str = "vector") -> List[float]:
    """'1,-2.5,3' -> [1.0, -2.5, 3.0]"""
    try:
        values = [float(item) for item in text.split(",")]
    except ValueError:
        raise InvalidInputError(f"{name} must be comma-separated reals, got '{text}'")
    return cone_model.as_vector(values, name).tolist()


def _emit(payload) -> None:
    print(json.dumps(payload, allow_nan=False))


# =============================================================================
# COMMANDS
# =============================================================================


def cmd_construct(args, config) -> int:
    """Emit the normals of a cone family as a ProblemDocument."""
    if args.kind in ("orthant", "extremal"):
        if args.dim is None:
            raise InvalidInputError(f"construct {args.kind} needs --dim")
        cone = cone_model.create_cone(args.kind, dim=args.dim)
    elif args.kind == "monotone":
        if args.weights is None:
            raise InvalidInputError("construct monotone needs --weights")
        cone = cone_model.create_cone("monotone", weights=cone_model.WeightVector(parse_vector(args.weights, "weights")))
    else:
        if args.graph is None:
            raise InvalidInputError("construct isotonic needs --graph")
        document = problem_document.load_document(args.graph)
        if document.graph is None:
            raise InvalidInputError(f"{args.graph} has no 'graph' field")
        weights = document.to_weights()
        if args.weights is not None:
            weights = cone_model.WeightVector(parse_vector(args.weights, "weights"))
        cone = cone_model.create_cone("isotonic", graph=document.to_graph(), weights=weights)

    print(problem_document.ProblemDocument.from_cone(cone).dumps())
    return EXIT_OK


def cmd_analyze(args, config) -> int:
    document = problem_document.load_document(args.input)
    _emit(analysis.analyze_document(document, config))
    return EXIT_OK


def cmd_project(args, config) -> int:
    """Project --point, or every point of the document when --point is omitted."""
    document = problem_document.load_document(args.input)
    cone = document.to_cone()

    if args.point is not None:
        result = solvers.project(cone, parse_vector(args.point, "point"), config, args.method)
        _emit(result.to_dict())
        return EXIT_OK

    if not document.points:
        raise InvalidInputError("give --point or a 'points' field in the document")
    results = solvers.project_batch(cone, document.points, config, args.method)
    _emit({"results": [result.to_dict() for result in results]})
    return EXIT_OK


def cmd_isoreg(args, config) -> int:
    document = problem_document.load_document(args.graph)
    if document.graph is None:
        raise InvalidInputError(f"{args.graph} has no 'graph' field")
    weights = document.to_weights()
    if args.weights is not None:
        weights = cone_model.WeightVector(parse_vector(args.weights, "weights"))

    problem = solvers.RegressionProblem(parse_vector(args.y, "y"), weights, document.to_graph())
    iso, result = solvers.fit_isotonic(problem, config, args.method)
    report = {"iso": iso.tolist()}
    report.update({key: value for key, value in result.to_dict().items() if key != "point"})
    _emit(report)
    return EXIT_OK


def cmd_falsify(args, config) -> int:
    document = problem_document.load_document(args.input)
    seed = config.seed if args.seed is None else args.seed
    witness = analysis.find_isotonicity_counterexample(
        document.to_cone(), args.order, args.trials, seed, config
    )
    _emit({
        "witness": None if witness is None else witness.to_dict(),
        "order": args.order,
        "trials": args.trials,
        "seed": seed,
    })
    return EXIT_OK


# =============================================================================
# PARSER
# =============================================================================


def _add_solver_flags(parser):
    parser.add_argument("--method", choices=["auto", *solvers.SOLVER_METHODS], default="auto",
                        help="Projection method (default: auto)")
    parser.add_argument("--tol", type=float, help="Dykstra stopping tolerance")
    parser.add_argument("--max-iter", type=int, help="Dykstra cycle budget")
    parser.add_argument("--seed", type=int, help="Seed recorded in the configuration")


def build_parser() -> argparse.ArgumentParser:
    parser = IsoconeArgumentParser(
        prog="isocone",
        description="Isotonic projection analysis and projections onto polyhedral cones",
    )
    parser.add_argument("--config", help="Solver parameter file (default data/solver-parameters.json)")
    parser.add_argument("--verbose", action="store_true", help="Debug logging on standard error")
    commands = parser.add_subparsers(dest="command", required=True)

    construct = commands.add_parser("construct", help="Emit the normals of a cone family")
    construct.add_argument("kind", choices=list(cone_model.CONE_FAMILIES))
    construct.add_argument("--dim", type=int, help="Dimension (orthant, extremal)")
    construct.add_argument("--weights", help="Comma-separated positive weights (monotone, isotonic)")
    construct.add_argument("--graph", help="Document with a 'graph' field (isotonic)")
    construct.set_defaults(handler=cmd_construct)

    analyze = commands.add_parser("analyze", help="Report the isotonic projection checks")
    analyze.add_argument("input", help="ProblemDocument")
    analyze.set_defaults(handler=cmd_analyze)

    project = commands.add_parser("project", help="Project a point onto the document's cone")
    project.add_argument("input", help="ProblemDocument")
    project.add_argument("--point", help="Comma-separated coordinates (use --point=-1,2 for negatives)")
    _add_solver_flags(project)
    project.set_defaults(handler=cmd_project)

    isoreg = commands.add_parser("isoreg", help="Weighted isotonic regression over a graph")
    isoreg.add_argument("graph", help="Document with a 'graph' field")
    isoreg.add_argument("--y", required=True, help="Comma-separated observations")
    isoreg.add_argument("--weights", help="Comma-separated positive weights (default: document or unit)")
    _add_solver_flags(isoreg)
    isoreg.set_defaults(handler=cmd_isoreg)

    falsify = commands.add_parser("falsify", help="Search for u <= v with unordered projections")
    falsify.add_argument("input", help="ProblemDocument")
    falsify.add_argument("--order", choices=list(analysis.ORDERS), default="cone")
    falsify.add_argument("--trials", type=int, default=1000)
    falsify.add_argument("--seed", type=int, help="Search seed (default from configuration)")
    falsify.set_defaults(handler=cmd_falsify)

    return parser


def _configure_logging(verbose: bool):
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(levelname)s %(name)s: %(message)s"))
    root = logging.getLogger("isocone")
    root.handlers[:] = [handler]
    root.setLevel(logging.DEBUG if verbose else logging.WARNING)
    root.propagate = False


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose)

    try:
        config = solver_config.load_solver_config(
            args.config,
            dykstra_tol=getattr(args, "tol", None),
            dykstra_max_iter=getattr(args, "max_iter", None),
            seed=getattr(args, "seed", None),
        )
        return args.handler(args, config)
    except ExactGeometryCapError as e:
        print(f"isocone: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except ConvergenceError as e:
        print(f"isocone: {e} (iterations {e.iterations}, residual {e.residual:.3e})", file=sys.stderr)
        if e.best_point is not None:
            print(f"isocone: best iterate {json.dumps(e.best_point.tolist())}", file=sys.stderr)
        return EXIT_NUMERICAL
    except DegenerateProjectionError as e:
        print(f"isocone: {e}", file=sys.stderr)
        if e.candidate is not None:
            print(f"isocone: best candidate {json.dumps(e.candidate.to_dict())}", file=sys.stderr)
        return EXIT_NUMERICAL
    except NumericalError as e:
        print(f"isocone: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (InvalidInputError, DimensionMismatchError, ValidationError) as e:
        print(f"isocone: {e}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
