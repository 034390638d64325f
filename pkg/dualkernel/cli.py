"""Command-line driver.

Exit codes: 0 accept, 1 reject, 2 unknown, 3 usage or parse error. With
``--json`` the report is printed as a single JSON object on standard output;
logs always go to standard error.
"""

import argparse
import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor

from dualkernel import commands
from dualkernel.config import Settings, configure_logging
from dualkernel.errors import ConfigurationError
from dualkernel.report import ACCEPT, EXIT_USAGE, Report

logger = logging.getLogger(__name__)

DEFAULT_HOST = "0.0.0.0"
DEFAULT_PORT = 8001


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


def _global_options(parser, suppress):
    default = argparse.SUPPRESS if suppress else None
    parser.add_argument("--json", action="store_true", default=argparse.SUPPRESS if suppress else False,
                        help="print the report as one JSON object")
    parser.add_argument("--fuel", type=int, default=default, help="β-steps allowed per evaluation")
    parser.add_argument("--max-classes", type=int, default=default, dest="max_classes",
                        help="bound on representatives per type")
    parser.add_argument("--log-level", default=default, dest="log_level", help="DEBUG, INFO, WARNING, ...")


def build_parser():
    parser = _Parser(prog="dualkernel", description="Dual-kernel checker for Martin-Löf type theory.")
    _global_options(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    def command(container, name, help_text):
        cmd = container.add_parser(name, help=help_text)
        _global_options(cmd, suppress=True)
        return cmd

    cmd = command(sub, "eval", "evaluate a closed term to canonical form")
    cmd.add_argument("files", nargs="+", metavar="FILE")

    cmd = command(sub, "check", "validate a derivation against the rule catalog")
    cmd.add_argument("files", nargs="+", metavar="DERIVATION-FILE")

    cmd = command(sub, "sem", "decide a sequent by the meaning explanations")
    cmd.add_argument("files", nargs="+", metavar="SEQUENT-FILE")

    lf_cmd = sub.add_parser("lf", help="proof-theoretic kernel")
    lf_sub = lf_cmd.add_subparsers(dest="lf_command", parser_class=_Parser)
    lf_sub.required = True

    cmd = command(lf_sub, "check", "check a proof term against a type")
    cmd.add_argument("files", nargs="+", metavar="TERM-FILE")
    cmd.add_argument("--type", required=True, dest="type_text", metavar="TYPE")
    cmd.add_argument("--sig", dest="sig_file", metavar="FILE")
    cmd.add_argument("--ctx", dest="ctx_text", metavar="CONTEXT")

    cmd = command(lf_sub, "infer", "synthesize the type of a neutral proof term")
    cmd.add_argument("files", nargs="+", metavar="TERM-FILE")
    cmd.add_argument("--sig", dest="sig_file", metavar="FILE")
    cmd.add_argument("--ctx", dest="ctx_text", metavar="CONTEXT")

    cmd = command(lf_sub, "erase", "erase a proof term to a computational term")
    cmd.add_argument("files", nargs="+", metavar="TERM-FILE")

    cmd = command(sub, "bridge", "check, erase, then decide membership of the erasure")
    cmd.add_argument("files", nargs="+", metavar="TERM-FILE")
    cmd.add_argument("--type", required=True, dest="type_text", metavar="TYPE")
    cmd.add_argument("--sig", dest="sig_file", metavar="FILE")

    cmd = command(sub, "serve", "run the HTTP checking service")
    cmd.add_argument("--host", default=DEFAULT_HOST)
    cmd.add_argument("--port", type=int, default=DEFAULT_PORT)
    return parser


def _read(path):
    if path == "-":
        return sys.stdin.read()
    with open(path, encoding="utf-8") as handle:
        return handle.read()


def _runner(args, settings):
    """A function from (text, file) to Report for the selected subcommand."""
    command = args.command if args.command != "lf" else f"lf {args.lf_command}"
    sig_text = _read(args.sig_file) if getattr(args, "sig_file", None) else None
    if command == "eval":
        return lambda text, file: commands.run_eval(text, settings, file=file)
    if command == "check":
        return lambda text, file: commands.run_check(text, file=file)
    if command == "sem":
        return lambda text, file: commands.run_sem(text, settings, file=file)
    if command == "lf check":
        return lambda text, file: commands.run_lf_check(text, args.type_text, sig_text, args.ctx_text, file=file)
    if command == "lf infer":
        return lambda text, file: commands.run_lf_infer(text, sig_text, args.ctx_text, file=file)
    if command == "lf erase":
        return lambda text, file: commands.run_lf_erase(text, file=file)
    return lambda text, file: commands.run_bridge(text, args.type_text, sig_text, settings, file=file)


def _run_file(runner, path):
    try:
        text = _read(path)
    except (OSError, UnicodeDecodeError) as error:
        return Report.usage(f"cannot read {path}: {error}")
    return runner(text, path)


def run_files(runner, paths):
    """One report per path; several paths are checked concurrently."""
    if len(paths) == 1:
        return _run_file(runner, paths[0])
    workers = min(len(paths), os.cpu_count() or 1)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        reports = list(pool.map(lambda path: _run_file(runner, path), paths))
    return commands.combine(zip(paths, reports))


def render(command, report):
    """Human-readable output for a report."""
    lines = []
    data = report.data
    if "files" in data:
        lines.append(f"{report.verdict}: {data['accepted']}/{data['total']} accepted")
    elif command == "eval" and report.verdict == ACCEPT:
        lines.append(data["value"])
    elif command == "eval" and data.get("result") == "stuck":
        lines.append(f"STUCK {data['at']}")
    elif command == "eval" and data.get("result") == "fuel":
        lines.append("FUEL")
    elif command == "lf infer" and report.verdict == ACCEPT:
        lines.append(data["type"])
    elif command == "lf erase" and report.verdict == ACCEPT:
        lines.append(data["expr"])
    else:
        lines.append(report.verdict)
    if report.verdict != ACCEPT or report.usage_error:
        lines.extend(str(d) for d in report.diagnostics)
    return "\n".join(lines)


def main(argv=None):
    try:
        args = build_parser().parse_args(argv)
        settings = Settings.from_env().override(args.fuel, args.max_classes, args.log_level)
    except (_UsageError, ConfigurationError) as error:
        print(error, file=sys.stderr)
        return EXIT_USAGE
    configure_logging(settings.log_level)

    if args.command == "serve":
        from dualkernel_server import create_app

        logger.info("serving on %s:%d", args.host, args.port)
        create_app(settings).run(host=args.host, port=args.port)
        return 0

    command = args.command if args.command != "lf" else f"lf {args.lf_command}"
    try:
        runner = _runner(args, settings)
    except (OSError, UnicodeDecodeError) as error:
        report = Report.usage(f"cannot read signature: {error}")
    else:
        report = run_files(runner, args.files)
    logger.info("%s finished: %s", command, report.verdict)

    if args.json:
        print(report.to_json())
    else:
        print(render(command, report))
    return report.exit_code


if __name__ == "__main__":
    sys.exit(main())
