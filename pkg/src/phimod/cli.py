"""Command line front end.

Each subcommand reads one JSON job description (a file path, or "-" for
stdin), validates it against the bundled schema for that subcommand, and
prints a JSON result to stdout or --output.  A job may instead carry a
"jobs" list; the top level keys then act as shared defaults for every
entry, results come back as a JSON array in order, and --jobs N spreads
the entries over worker processes.

--report-dir writes delimited data plus a rendered figure next to the
main output for the subcommands that have something to plot: kisin and
flat emit counts per coefficient extension degree, local-model emits a
histogram of lattice position types, and the tree subcommands emit the
displacement profile of the searched ball.  cartan, conj-solve and isom
produce single certified values with no series to report, so they accept
no --report-dir.

Exit codes: 0 success (a non_isomorphic verdict is a success), 2 for
results undecidable at the working precision or search window, 3 when a
search box exceeds its enumeration limit, 1 for anything malformed.
"""

import argparse
import json
import sys
from concurrent.futures import ProcessPoolExecutor
from importlib import resources

import jsonschema

from .conjugacy import conj_solve_report, isom_test
from .errors import (BoxTooLarge, InsufficientPrecision, IterateEscaped,
                     PhimodError, ValidationError)
from .fields import FieldSpec, find_irreducible
from .grassmannian import (DEFAULT_BOX_LIMIT, flat_points, kisin_points,
                           local_model_count)
from .matrices import SeriesMatrix, cartan_type
from .report import (degree_count_report, displacement_report,
                     type_histogram_report)
from .selftest import run_selftest
from .series import format_series
from .tree import classify, displacement_profile, export_ball

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_UNDECIDED = 2
EXIT_BOX = 3


# -- job plumbing --------------------------------------------------------------


def _load_schema(name):
    text = resources.files("phimod").joinpath(f"schemas/{name}.json").read_text()
    return json.loads(text)


def _validate(job, schema_name):
    schema = _load_schema(schema_name)
    try:
        jsonschema.validate(job, schema)
    except jsonschema.ValidationError as exc:
        raise ValidationError(f"job does not match the {schema_name} schema: "
                              f"{exc.message}") from exc


def _read_job(path):
    if path == "-":
        text = sys.stdin.read()
    else:
        with open(path) as handle:
            text = handle.read()
    job = json.loads(text)
    if not isinstance(job, dict):
        raise ValidationError("a job file must hold a JSON object")
    return job


def _expand(job, schema_name):
    """Return (entries, is_batch) after validating each merged entry."""
    _validate(job, schema_name)
    subs = job.get("jobs")
    if subs is None:
        return [job], False
    base = {key: value for key, value in job.items() if key != "jobs"}
    entries = []
    for sub in subs:
        merged = {**base, **sub}
        if "jobs" in merged:
            raise ValidationError("job lists cannot nest")
        _validate(merged, schema_name)
        entries.append(merged)
    return entries, True


def _field_from_job(job):
    p = job["p"]
    r = job.get("r", 1)
    modulus = job.get("modulus")
    if r > 1 and modulus is None:
        modulus = find_irreducible(p, r)
    if modulus is not None:
        modulus = tuple(modulus)
    return FieldSpec(p, r, modulus=modulus,
                     coeff_frobenius=job.get("coeff_frobenius", False))


def _matrix_from_job(field, job, key):
    return SeriesMatrix.from_literals(field, job[key])


# -- runners -------------------------------------------------------------------
#
# Each runner maps a validated job to (result_dict, exit_code).  When the
# caller wants report files the runner tucks the plottable rows under the
# "_report" key; everything stays JSON serializable so batch entries can
# run in worker processes.


def _run_cartan(job, want_report):
    field = _field_from_job(job)
    a = _matrix_from_job(field, job, "A")
    t = cartan_type(a, prec=job.get("precision"))
    return {"type": list(t), "det_valuation": t.total()}, EXIT_OK


def _run_conj_solve(job, want_report):
    field = _field_from_job(job)
    a = _matrix_from_job(field, job, "A")
    h = _matrix_from_job(field, job, "B")
    rep = conj_solve_report(a, h, job["n"], prec=job.get("precision"),
                            order=job.get("mode", "sequential"))
    result = {
        "witness": rep.witness.to_literals(),
        "kappas": list(rep.kappas),
        "pole_bound": rep.pole,
        "precision": rep.prec,
    }
    return result, EXIT_OK


def _run_isom(job, want_report):
    field = _field_from_job(job)
    a = _matrix_from_job(field, job, "A")
    b = _matrix_from_job(field, job, "B")
    rep = isom_test(a, b, prec=job.get("precision"),
                    box_limit=job.get("box_limit", 10 ** 6))
    code = EXIT_UNDECIDED if rep.verdict == "undecided" else EXIT_OK
    return rep.as_dict(), code


def _degree_rows(points_fn, top_ext):
    rows = []
    for degree in range(1, top_ext + 1):
        rep = points_fn(degree)
        rows.append((degree, rep.field.q, rep.count, rep.searched))
    return rows


def _run_kisin(job, want_report):
    field = _field_from_job(job)
    a = _matrix_from_job(field, job, "A")
    nu = tuple(job["nu"])
    mode = job.get("mode", "closed")
    ext = job.get("ext", 1)
    limit = job.get("box_limit", DEFAULT_BOX_LIMIT)
    rep = kisin_points(a, nu, mode=mode, ext=ext, box_limit=limit)
    result = {"mode": mode, "ext": ext, "field_size": rep.field.q,
              **rep.as_dict()}
    if want_report:
        result["_report"] = {
            "kind": "degrees",
            "rows": _degree_rows(
                lambda s: kisin_points(a, nu, mode=mode, ext=s,
                                       box_limit=limit), ext),
        }
    return result, EXIT_OK


def _run_flat(job, want_report):
    field = _field_from_job(job)
    a = _matrix_from_job(field, job, "A")
    e, h = job["e"], job["h"]
    ext = job.get("ext", 1)
    limit = job.get("box_limit", DEFAULT_BOX_LIMIT)
    rep = flat_points(a, e, h, ext=ext, box_limit=limit)
    result = {"e": e, "h": h, "ext": ext, "field_size": rep.field.q,
              **rep.as_dict()}
    if want_report:
        result["_report"] = {
            "kind": "degrees",
            "rows": _degree_rows(
                lambda s: flat_points(a, e, h, ext=s, box_limit=limit), ext),
        }
    return result, EXIT_OK


def _run_local_model(job, want_report):
    field = _field_from_job(job)
    rep = local_model_count(field, job["d"], job["e"], job["h"],
                            box_limit=job.get("box_limit", DEFAULT_BOX_LIMIT))
    histogram = {}
    for t in rep.types:
        label = ",".join(str(c) for c in t)
        histogram[label] = histogram.get(label, 0) + 1
    items = sorted(histogram.items())
    result = {
        "count": rep.count,
        "box": rep.box,
        "searched": rep.searched,
        "types": [{"type": label, "count": n} for label, n in items],
    }
    if want_report:
        result["_report"] = {"kind": "types", "rows": items}
    return result, EXIT_OK


def _profile_rows(profile):
    rows = []
    for i, v in enumerate(profile.vertices):
        divisors = ":".join(str(a) for a in v.diag)
        rows.append((i, divisors, profile.distances[i],
                     profile.displacements[i]))
    return rows


def _run_tree_classify(job, want_report):
    field = _field_from_job(job)
    a = _matrix_from_job(field, job, "A")
    rep = classify(a, radius=job.get("radius"))
    result = rep.as_dict()
    if want_report:
        profile = displacement_profile(a, radius=job.get("radius"))
        result["_report"] = {"kind": "profile", "rows": _profile_rows(profile)}
    return result, EXIT_OK


def _run_tree_export(job, want_report):
    field = _field_from_job(job)
    a = _matrix_from_job(field, job, "A")
    fmt = job.get("format", "dot")
    text = export_ball(a, radius=job.get("radius"), fmt=fmt)
    if fmt == "json":
        result = {"format": fmt, "ball": json.loads(text)}
    else:
        result = {"format": fmt, "text": text}
    if want_report:
        profile = displacement_profile(a, radius=job.get("radius"))
        result["_report"] = {"kind": "profile", "rows": _profile_rows(profile)}
    return result, EXIT_OK


COMMANDS = {
    "cartan": ("cartan", _run_cartan, False),
    "conj-solve": ("conj_solve", _run_conj_solve, False),
    "isom": ("isom", _run_isom, False),
    "kisin": ("kisin", _run_kisin, True),
    "flat": ("flat", _run_flat, True),
    "local-model": ("local_model", _run_local_model, True),
    "tree-classify": ("tree_classify", _run_tree_classify, True),
    "tree-export": ("tree_export", _run_tree_export, True),
}

REPORT_RENDERERS = {
    "degrees": degree_count_report,
    "profile": displacement_report,
    "types": type_histogram_report,
}


def _worker(payload):
    command, job, want_report = payload
    _, runner, _ = COMMANDS[command]
    return runner(job, want_report)


def _render_reports(results, command, report_dir, is_batch):
    for i, result in enumerate(results):
        payload = result.pop("_report", None)
        if payload is None:
            continue
        stem = f"{command}-{i}" if is_batch else command
        renderer = REPORT_RENDERERS[payload["kind"]]
        csv_path, png_path = renderer(report_dir, stem, payload["rows"])
        result["report_files"] = [csv_path, png_path]


def _emit(text, output):
    if output is None:
        sys.stdout.write(text)
        if not text.endswith("\n"):
            sys.stdout.write("\n")
    else:
        with open(output, "w") as handle:
            handle.write(text)


def _run_command(command, args):
    schema_name, runner, has_report = COMMANDS[command]
    job = _read_job(args.job)
    report_dir = getattr(args, "report_dir", None)
    entries, is_batch = _expand(job, schema_name)
    want_report = report_dir is not None
    payloads = [(command, entry, want_report) for entry in entries]
    if is_batch and args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_worker, payloads))
    else:
        outcomes = [_worker(p) for p in payloads]
    results = [res for res, _ in outcomes]
    code = max(code for _, code in outcomes)
    if want_report:
        _render_reports(results, command, report_dir, is_batch)
    if is_batch:
        text = json.dumps(results, indent=2, sort_keys=True) + "\n"
    elif command == "tree-export" and results[0].get("format") == "dot":
        text = results[0]["text"]
    else:
        text = json.dumps(results[0], indent=2, sort_keys=True) + "\n"
    _emit(text, args.output)
    return code


def _add_job_arguments(sub, has_report):
    sub.add_argument("job", help="path of the JSON job description, - for stdin")
    sub.add_argument("--output", default=None, metavar="PATH",
                     help="write the result here instead of stdout")
    if has_report:
        sub.add_argument("--report-dir", default=None, metavar="DIR",
                         help="also write CSV data and a PNG figure here")
    sub.add_argument("--jobs", type=int, default=1, metavar="N",
                     help="worker processes for a batch job list")


def _parser():
    parser = argparse.ArgumentParser(
        prog="phimod",
        description="exact computations with semilinear Frobenius modules "
                    "over Laurent series fields")
    parser.add_argument("--reproducible", action="store_true",
                        help="pin the seed of randomized subcommands "
                             "(only selftest draws randomness)")
    commands = parser.add_subparsers(dest="command", required=True)

    help_text = {
        "cartan": "elementary divisor type of a series matrix",
        "conj-solve": "solve the twisted conjugation congruence g A "
                      "phi(g)^-1 A^-1 g = B",
        "isom": "decide isomorphism of two rank-d Frobenius modules",
        "kisin": "count lattices L with u^nu | basis change | u^nu "
                 "against A phi(L)",
        "flat": "count lattices with type totals allowed by flat "
                "deformations of level (e, h)",
        "local-model": "count all lattice points of the level (e, h) "
                       "local model, no Frobenius condition",
    }
    for name in ("cartan", "conj-solve", "isom", "kisin", "flat",
                 "local-model"):
        sub = commands.add_parser(name, help=help_text[name])
        _add_job_arguments(sub, COMMANDS[name][2])

    tree = commands.add_parser(
        "tree", help="rank 2 lattice tree: classification and ball export")
    tree_sub = tree.add_subparsers(dest="tree_command", required=True)
    sub = tree_sub.add_parser(
        "classify", help="decide the module shape from displacement data")
    _add_job_arguments(sub, True)
    sub = tree_sub.add_parser(
        "export", help="render a displacement ball as dot or JSON")
    _add_job_arguments(sub, True)

    sub = commands.add_parser(
        "selftest", help="run built in consistency checks on random inputs")
    sub.add_argument("--seed", type=int, default=None,
                     help="random seed (default: fresh entropy)")
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    command = args.command
    if command == "tree":
        command = f"tree-{args.tree_command}"
    try:
        if command == "selftest":
            seed = args.seed
            if seed is None and args.reproducible:
                seed = 0
            failures = run_selftest(seed=seed)
            return EXIT_OK if failures == 0 else EXIT_ERROR
        return _run_command(command, args)
    except BoxTooLarge as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BOX
    except (InsufficientPrecision, IterateEscaped) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED
    except PhimodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (OSError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
