"""bench - run problems, convergence studies and spectral signatures from the command line

    cwenolab solve --problem euler-lax --scheme cwenoz --order 5 --M 200
    cwenolab convergence --problem advection-smooth17 --order 5 --M 160 320 640 1280
    cwenolab reference --problem swe-smooth19
    cwenolab spectra --scheme cwenoz --order 5 --N 128
    cwenolab weights-trace --problem advection-smooth17 --scheme cweno --order 5 --M 400
    cwenolab dft --problem advection-ellipse18 --scheme weno --order 5 --M 400

Every CSV written starts with a # line echoing the resolved configuration.
Exit codes: 0 ok, 1 usage, 2 blow-up, 3 missing reference.
"""
import os, sys
import argparse
import collections
import concurrent.futures
import configparser
import csv
import logging
import math
import re

import numpy as np

from . import mesh
from . import models
from . import recon
from . import solver
from . import spectral
from . import workbook

logger = logging.getLogger(__package__)

LOG_FORMAT = "%(name)s - %(asctime)s - %(levelname)s - %(message)s"

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BLOWUP = 2
EXIT_MISSING_REFERENCE = 3

LINEAR_CENTRAL = "linear-central"
EXACT = "exact"
SCHEMES = recon.FAMILIES + (LINEAR_CENTRAL, EXACT)

REFERENCE_SCHEME = (recon.CWENOZ, 5)
REFERENCE_M = 8192

class x_bench(Exception): pass
class x_usage(x_bench): pass
class x_missing_reference(x_bench): pass

RunConfig = collections.namedtuple(
    "RunConfig",
    [
        "problem", "scheme", "order", "M", "N", "eps_rule", "t", "d0", "tau", "cfl", "out",
        "characteristic", "tableau", "t_end", "reference_dir", "reference_M", "workers",
        "xlsx", "dump_e", "make_reference",
    ],
)
DEFAULTS = collections.OrderedDict([
    ("problem", "advection-smooth17"),
    ("scheme", recon.CWENOZ),
    ("order", 5),
    ("M", None),
    ("N", spectral.DEFAULT_N),
    ("eps_rule", None),
    ("t", 2.0),
    ("d0", 0.5),
    ("tau", recon.OPTIMAL),
    ("cfl", solver.DEFAULT_CFL),
    ("out", "."),
    ("characteristic", None),
    ("tableau", None),
    ("t_end", None),
    ("reference_dir", None),
    ("reference_M", REFERENCE_M),
    ("workers", 1),
    ("xlsx", False),
    ("dump_e", False),
    ("make_reference", False),
])

ConvergenceRow = collections.namedtuple("ConvergenceRow", ["M", "error", "rate"])


#
# Configuration
#
def parse_eps_rule(text):
    """parse_eps_rule - read `c*h^p` into (c, p)

    Accepts 1*h^2, 0.1*h^2.5, h^4, h, 1e-6 and ** for ^.
    """
    if isinstance(text, tuple):
        return text
    rule = text.replace(" ", "").replace("**", "^")
    try:
        if "h" in rule:
            coefficient, _, power = rule.partition("h")
            coefficient = coefficient.rstrip("*") or "1"
            power = power.lstrip("^") or "1"
        else:
            coefficient, power = rule, "0"
        return float(coefficient), float(power)
    except ValueError:
        raise x_usage("Cannot read eps rule %r; expected c*h^p" % text)

def format_eps_rule(eps_rule):
    if eps_rule is None:
        return "auto"
    return "%g*h^%g" % eps_rule

def _parse_bool(value):
    if isinstance(value, bool):
        return value
    try:
        return configparser.ConfigParser.BOOLEAN_STATES[str(value).strip().lower()]
    except KeyError:
        raise x_usage("%r is not a boolean" % value)

def _parse_M(value):
    if isinstance(value, (list, tuple)):
        return tuple(int(v) for v in value)
    return tuple(int(v) for v in re.split(r"[,\s]+", str(value).strip()) if v)

CONVERTERS = {
    "order" : int,
    "M" : _parse_M,
    "N" : int,
    "eps_rule" : parse_eps_rule,
    "t" : float,
    "d0" : float,
    "cfl" : float,
    "characteristic" : _parse_bool,
    "t_end" : float,
    "reference_M" : int,
    "workers" : int,
    "xlsx" : _parse_bool,
    "dump_e" : _parse_bool,
    "make_reference" : _parse_bool,
}
_FIELDS_BY_KEY = dict((field.lower(), field) for field in RunConfig._fields)

def _convert(field, value):
    if value is None:
        return None
    try:
        return CONVERTERS.get(field, str)(value)
    except ValueError as exc:
        raise x_usage("Bad value %r for %s: %s" % (value, field, exc))

def load_config(filepath):
    """load_config - read a `key = value` configuration file

    Keys are the long option names, with dashes or underscores. Returns a
    dict of RunConfig fields to converted values.
    """
    parser = configparser.ConfigParser(comment_prefixes=("#", ";"), inline_comment_prefixes=("#",))
    try:
        with open(filepath, encoding="utf-8") as f:
            parser.read_string("[cwenolab]\n" + f.read(), source=filepath)
    except (OSError, configparser.Error) as exc:
        raise x_usage("Cannot read config %s: %s" % (filepath, exc))

    values = {}
    for key, value in parser.items("cwenolab"):
        field = _FIELDS_BY_KEY.get(key.replace("-", "_").lower())
        if field is None:
            raise x_usage("Unknown key %r in %s" % (key, filepath))
        values[field] = _convert(field, value)
    logger.debug("Read %d settings from %s", len(values), filepath)
    return values

def make_run_config(**values):
    """make_run_config - merge values over the defaults and validate them

    Every field is checked against the registries before anything runs.
    """
    unknown = set(values) - set(DEFAULTS)
    if unknown:
        raise x_usage("Unknown settings: %s" % ", ".join(sorted(unknown)))
    settings = DEFAULTS.copy()
    settings.update((field, _convert(field, value)) for field, value in values.items() if value is not None)

    problem = models.problem_from_key(settings["problem"])
    if settings["scheme"] not in SCHEMES:
        raise x_usage("Unknown scheme %r; choose from %s" % (settings["scheme"], ", ".join(SCHEMES)))
    if settings["tau"] not in recon.TAU_VARIANTS:
        raise x_usage("Unknown tau variant %r" % settings["tau"])
    if not settings["M"]:
        settings["M"] = (problem.M,)
    if any(M < 1 for M in settings["M"]):
        raise x_usage("Cell counts must be positive: %s" % (settings["M"],))
    if not 0 < settings["cfl"] < 1:
        raise x_usage("CFL number %r is not in (0, 1)" % settings["cfl"])
    if settings["workers"] < 1:
        raise x_usage("Need at least one worker")
    if settings["reference_dir"] is None:
        settings["reference_dir"] = settings["out"]

    config = RunConfig(**settings)
    if config.scheme in recon.FAMILIES:
        build_scheme(config)
    return config

def describe(config):
    "One-line echo of a resolved configuration"
    return " ".join(
        "%s=%s" % (field, format_eps_rule(value) if field == "eps_rule" else value)
        for field, value in config._asdict().items()
    )

def build_scheme(config, family=None, order=None, problem=None):
    """build_scheme - the ReconScheme of a run

    With a problem the eps rule is resolved by models.eps_rule_for; without
    one (spectra on the unit domain) it is config.eps_rule or the plain h^2.
    """
    family = family or config.scheme
    order = order or config.order
    if family not in recon.FAMILIES:
        raise x_usage("Scheme %r is not a reconstruction" % family)
    if problem is None:
        eps_rule = config.eps_rule or recon.DEFAULT_EPS_RULE
    else:
        eps_rule = models.eps_rule_for(problem, order, config.eps_rule)
    return recon.ReconScheme(family, order, d0=config.d0, eps_rule=eps_rule, t=config.t, tau_variant=config.tau)


#
# Output
#
def _cell(value):
    if isinstance(value, (float, np.floating)):
        return 0 if value == 0 else float(value)
    if isinstance(value, np.integer):
        return int(value)
    return value

def write_csv(filepath, config, header, rows):
    with open(filepath, "w", newline="", encoding="utf-8") as f:
        f.write("# %s\n" % describe(config))
        writer = csv.writer(f)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_cell(value) for value in row])
    return filepath

def read_csv(filepath):
    "Header and rows of a CSV written by write_csv, skipping the # lines"
    with open(filepath, newline="", encoding="utf-8") as f:
        reader = csv.reader(line for line in f if not line.startswith("#"))
        header = next(reader)
        return header, list(reader)

def _output_path(config, name):
    os.makedirs(config.out, exist_ok=True)
    return os.path.join(config.out, name)


#
# Runs
#
def solver_config(config, problem, scheme):
    characteristic = problem.characteristic if config.characteristic is None else config.characteristic
    return solver.SolverConfig(scheme, config.cfl, problem.bc, characteristic, config.t_end or problem.t_end)

def run_problem(config, M, family=None, order=None):
    """run_problem - evolve one problem on M cells

    Returns (grid, interior averages (M, m), steps). A top-level function so
    that convergence runs can be farmed out to worker processes.
    """
    problem = models.problem_from_key(config.problem)
    scheme = build_scheme(config, family, order, problem)
    field0 = models.initial_field(problem, scheme, M)
    tableau = solver.load_tableau(config.tableau) if config.tableau else None
    field, steps = solver.advance(problem.model, field0, solver_config(config, problem, scheme), tableau)
    return field.grid, field.interior.copy(), steps

def restrict(values, M):
    "Average a fine-grid array of cell averages onto M coarse cells"
    values = np.asarray(values)
    fine = values.shape[0]
    if fine % M:
        raise x_usage("Reference on %d cells cannot be restricted to %d cells" % (fine, M))
    return values.reshape((M, fine // M) + values.shape[1:]).mean(axis=1)

def l1_error(values, reference, h):
    "h * sum_j |u_j - ref_j|, summed over components"
    return float(h * np.abs(np.asarray(values) - np.asarray(reference)).sum())

def reference_path(config):
    return os.path.join(config.reference_dir, "%s_reference_M%d.npz" % (config.problem, config.reference_M))

def make_reference(config):
    """make_reference - compute and cache the fine grid reference of a problem"""
    family, order = REFERENCE_SCHEME
    problem = models.problem_from_key(config.problem)
    t_end = config.t_end or problem.t_end
    logger.info("Computing %s reference for %s on %d cells", "%s%d" % REFERENCE_SCHEME, config.problem, config.reference_M)
    _, values, _ = run_problem(config, config.reference_M, family, order)
    os.makedirs(config.reference_dir, exist_ok=True)
    path = reference_path(config)
    np.savez(path, values=values, t_end=t_end, problem=config.problem)
    return path

def load_reference(config):
    problem = models.problem_from_key(config.problem)
    path = reference_path(config)
    if not os.path.exists(path):
        raise x_missing_reference(
            "No reference at %s; run `cwenolab reference --problem %s` or pass --make-reference" % (path, config.problem)
        )
    with np.load(path) as cached:
        if not math.isclose(float(cached["t_end"]), config.t_end or problem.t_end):
            raise x_missing_reference("Reference at %s is for t=%g; regenerate it" % (path, float(cached["t_end"])))
        return cached["values"]

def reference_values(config, grid):
    """Reference cell averages on `grid` at the final time

    Exact averages where the problem has an exact solution, otherwise the
    cached fine grid reference restricted to the grid.
    """
    problem = models.problem_from_key(config.problem)
    if problem.exact is not None:
        return models.exact_averages(problem, grid, config.t_end or problem.t_end)
    if config.make_reference and not os.path.exists(reference_path(config)):
        make_reference(config)
    return restrict(load_reference(config), grid.M)

def convergence_rows(config):
    """convergence_rows - the L1 error and rate for every M of the config

    Runs go to a process pool when config.workers > 1.
    """
    Ms = sorted(config.M)
    if config.workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=config.workers) as executor:
            results = list(executor.map(run_problem, [config] * len(Ms), Ms))
    else:
        results = [run_problem(config, M) for M in Ms]

    rows = []
    for M, (grid, values, _) in zip(Ms, results):
        error = l1_error(values, reference_values(config, grid), grid.h)
        rate = None
        if rows and rows[-1].error > 0 and error > 0:
            rate = math.log(rows[-1].error / error) / math.log(M / rows[-1].M)
        rows.append(ConvergenceRow(M, error, rate))
    return rows

def weights_trace(config):
    """weights_trace - relative deviation of a nonlinear weight from its linear weight

    On the initial cell averages: (omega_0 - d_0)/d_0 for the central
    families and (omega_1 - d_1)/d_1 for WENO at the right cell boundary.
    Returns (x, relerr).
    """
    problem = models.problem_from_key(config.problem)
    if problem.model.components != 1:
        raise x_usage("Weight traces need a scalar problem, %s has %d components" % (problem.name, problem.model.components))
    scheme = build_scheme(config, problem=problem)
    field = models.initial_field(problem, scheme, config.M[0])
    grid, r = field.grid, scheme.r
    block = field.values[grid.ghost - (r - 1):grid.ghost + grid.M + (r - 1), 0]
    omega = recon.weights(scheme, recon.stencil_windows(block, r), grid.h, xhat=0.5).omega[:, 0]
    if scheme.family == recon.WENO:
        d = recon.weno_optimal_weights(r, 0.5)[0]
    else:
        d = scheme.d[0]
    return grid.centers, (omega - d) / d

def dft_table(values, exact):
    """dft_table - half spectrum of numerical and exact cell data

    Returns rows (k, re_num, im_num, re_exact, im_exact) of rfft / M.
    """
    values = np.asarray(values, dtype=float).ravel()
    exact = np.asarray(exact, dtype=float).ravel()
    M = len(values)
    numerical, reference = np.fft.rfft(values) / M, np.fft.rfft(exact) / M
    return [
        (k, numerical[k].real, numerical[k].imag, reference[k].real, reference[k].imag)
        for k in range(len(numerical))
    ]

def spectral_operator(config):
    """The derivative operator of a spectra run, its label and its formal order

    The central difference is second order whatever --order says; the
    exact derivative has no order.
    """
    if config.scheme == LINEAR_CENTRAL:
        return spectral.central_derivative(), "%s2" % LINEAR_CENTRAL, 2
    if config.scheme == EXACT:
        return spectral.spectral_derivative(), EXACT, None
    scheme = build_scheme(config)
    return spectral.upwind_fv_derivative(scheme), scheme.label, scheme.order


#
# Commands: generators yielding progress messages
#
def cmd_solve(config):
    problem = models.problem_from_key(config.problem)
    label = build_scheme(config).label
    M = config.M[0]
    yield "Solve %s with %s on %d cells" % (problem.name, label, M)
    grid, values, steps = run_problem(config, M)
    yield "Reached t=%g in %d steps" % (steps[-1].t if steps else 0.0, len(steps))

    stem = "%s_%s_M%d" % (problem.name, label, M)
    header = ["x"] + ["comp%d" % c for c in range(values.shape[1])]
    path = write_csv(_output_path(config, stem + ".csv"), config, header, (
        (x,) + tuple(row) for x, row in zip(grid.centers, values)
    ))
    yield "Solution written to %s" % path
    path = write_csv(_output_path(config, stem + "_steps.csv"), config, ["step", "t", "dt", "max_wavespeed"], steps)
    yield "Step log written to %s" % path

def cmd_convergence(config):
    label = build_scheme(config).label
    yield "Convergence of %s on %s for M = %s" % (label, config.problem, ", ".join(str(M) for M in sorted(config.M)))
    rows = convergence_rows(config)
    for row in rows:
        yield "M=%d error=%.3e rate=%s" % (row.M, row.error, "-" if row.rate is None else "%.2f" % row.rate)

    stem = "%s_%s_convergence" % (config.problem, label)
    path = write_csv(_output_path(config, stem + ".csv"), config, ConvergenceRow._fields, rows)
    yield "Table written to %s" % path
    if config.xlsx:
        sheets = [(label, [("M", None), ("error", "sci"), ("rate", "rate")], rows)]
        for info in workbook.xlsx(sheets, _output_path(config, stem + ".xlsx")):
            yield info

def cmd_reference(config):
    yield "Reference for %s" % config.problem
    yield "Reference written to %s" % make_reference(config)

def cmd_spectra(config):
    op, label, order = spectral_operator(config)
    yield "Spectral signature of %s with N=%d" % (label, config.N)
    signature = spectral.signature(op, config.N, label)

    stem = "spectra_%s_N%d" % (label, config.N)
    header = ["k", "abscissa", "diffusion", "dispersion", "delta", "T_k", "Tj"]
    rows = list(zip(
        range(1, config.N + 1), signature.abscissa, signature.diffusion, signature.dispersion,
        signature.delta, signature.T_k, signature.Tj,
    ))
    yield "Signature written to %s" % write_csv(_output_path(config, stem + ".csv"), config, header, rows)
    summary = (config.scheme, order, config.N, signature.T)
    write_csv(_output_path(config, stem + "_summary.csv"), config, ["family", "order", "N", "T"], [summary])
    if config.dump_e:
        E_path = _output_path(config, stem + "_E.csv")
        write_csv(E_path, config, ["col%d" % c for c in range(2 * config.N)], signature.E)
        yield "Error matrix written to %s" % E_path
    if config.xlsx:
        columns = [("k", None), ("abscissa", "rate")] + [(name, "sci") for name in header[2:]]
        for info in workbook.xlsx([(label, columns, rows)], _output_path(config, stem + ".xlsx")):
            yield info
    yield "%s,%s,%d,%.6e" % (config.scheme, "-" if order is None else order, config.N, signature.T)

def cmd_weights_trace(config):
    label = build_scheme(config).label
    yield "Weight trace of %s on %s" % (label, config.problem)
    x, relerr = weights_trace(config)
    stem = "%s_%s_M%d_weights" % (config.problem, label, config.M[0])
    yield "Trace written to %s" % write_csv(_output_path(config, stem + ".csv"), config, ["x", "relerr"], zip(x, relerr))

def cmd_dft(config):
    problem = models.problem_from_key(config.problem)
    if problem.model.components != 1 or problem.exact is None or problem.bc != mesh.PERIODIC:
        raise x_usage("The DFT comparison needs a scalar periodic problem with an exact solution")
    label = build_scheme(config).label
    M = config.M[0]
    yield "DFT of %s on %s with %d cells" % (label, problem.name, M)
    grid, values, _ = run_problem(config, M)
    exact = models.exact_averages(problem, grid, config.t_end or problem.t_end)
    stem = "%s_%s_M%d_dft" % (problem.name, label, M)
    header = ["k", "re_num", "im_num", "re_exact", "im_exact"]
    yield "DFT written to %s" % write_csv(_output_path(config, stem + ".csv"), config, header, dft_table(values, exact))

COMMANDS = collections.OrderedDict([
    ("solve", cmd_solve),
    ("convergence", cmd_convergence),
    ("reference", cmd_reference),
    ("spectra", cmd_spectra),
    ("weights-trace", cmd_weights_trace),
    ("dft", cmd_dft),
])


#
# Command line
#
class ArgumentParser(argparse.ArgumentParser):
    "Report bad arguments as x_usage so they map onto exit code 1"

    def error(self, message):
        raise x_usage(message)

def setup_logging(debug=False, log_filepath=None):
    package_logger = logging.getLogger(__package__)
    for handler in list(package_logger.handlers):
        package_logger.removeHandler(handler)
        handler.close()
    package_logger.setLevel(logging.DEBUG)

    stdout_handler = logging.StreamHandler()
    stdout_handler.setLevel(logging.DEBUG if debug else logging.INFO)
    package_logger.addHandler(stdout_handler)

    if log_filepath:
        file_handler = logging.FileHandler(log_filepath, encoding="utf-8")
        file_handler.setFormatter(logging.Formatter(LOG_FORMAT))
        file_handler.setLevel(logging.DEBUG)
        package_logger.addHandler(file_handler)

def build_parser():
    common = ArgumentParser(add_help=False)
    common.add_argument("--problem")
    common.add_argument("--scheme")
    common.add_argument("--order", type=int)
    common.add_argument("--M", nargs="+", type=int, dest="M")
    common.add_argument("--N", type=int, dest="N")
    common.add_argument("--eps-rule", dest="eps_rule", help="c*h^p, h in domain lengths")
    common.add_argument("--t", type=float)
    common.add_argument("--d0", type=float)
    common.add_argument("--tau")
    common.add_argument("--cfl", type=float)
    common.add_argument("--out")
    common.add_argument("--config")
    common.add_argument("--characteristic", dest="characteristic", action="store_const", const=True)
    common.add_argument("--no-characteristic", dest="characteristic", action="store_const", const=False)
    common.add_argument("--tableau", help="CSV Butcher tableau")
    common.add_argument("--t-end", dest="t_end", type=float)
    common.add_argument("--reference-dir", dest="reference_dir")
    common.add_argument("--reference-M", dest="reference_M", type=int)
    common.add_argument("--workers", type=int)
    common.add_argument("--xlsx", action="store_const", const=True)
    common.add_argument("--dump-e", dest="dump_e", action="store_const", const=True)
    common.add_argument("--make-reference", dest="make_reference", action="store_const", const=True)
    common.add_argument("--debug", action="store_true")
    common.add_argument("--log", help="also log to this file")

    parser = ArgumentParser(prog="cwenolab", description=__doc__.splitlines()[0])
    subparsers = parser.add_subparsers(dest="command")
    for name in COMMANDS:
        subparsers.add_parser(name, parents=[common])
    return parser

def resolve(args):
    "Defaults < config file < command line flags"
    values = load_config(args.config) if args.config else {}
    for field in RunConfig._fields:
        value = getattr(args, field, None)
        if value is not None:
            values[field] = value
    return make_run_config(**values)

def run(args):
    config = resolve(args)
    logger.debug(describe(config))
    for info in COMMANDS[args.command](config):
        logger.info(info)

def main(argv=None):
    """main - run the command line and return its exit code"""
    try:
        args = build_parser().parse_args(argv)
        if not args.command:
            raise x_usage("No command given; choose from %s" % ", ".join(COMMANDS))
        setup_logging(args.debug, args.log)
        run(args)
    except x_missing_reference as exc:
        logger.error("%s", exc)
        return EXIT_MISSING_REFERENCE
    except (solver.x_blowup, solver.x_inadmissible_state) as exc:
        logger.error("Blow-up: %s", exc)
        return EXIT_BLOWUP
    except (x_usage, recon.x_recon, mesh.x_mesh, models.x_models, spectral.x_spectral, solver.x_solver, ValueError) as exc:
        logger.error("%s", exc)
        return EXIT_USAGE
    except KeyboardInterrupt:
        logger.warning("Interrupted")
        return EXIT_USAGE
    return EXIT_OK

def command_line():
    sys.exit(main())
