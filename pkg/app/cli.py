"""
Command-line surface: eval, hrr, chi-table, koszul and check.

Results go to stdout (aligned text, or JSON with --json); errors and logs
go to stderr. Exit codes: 0 success, 1 user error, 2 invariant violation.
"""

import functools
import json
import logging
from typing import Optional, Sequence

import click

from app.config import Settings, configure_logging
from app.models import Workspace
from app.utils.errors import CalculusError, InvariantViolation, UnsupportedInputError
from app.utils.expression import BUNDLE, evaluate_text, print_expr, value_to_json, value_to_text
from app.utils.invariants import InvariantSuite
from app.utils.koszul import koszul_homology, parse_sequence
from app.utils.riemann_roch import chi_table, chi_table_frame, hrr_check

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_USER_ERROR = 1
EXIT_INVARIANT = 2


def emit(payload, as_json: bool, text: str):
    if as_json:
        click.echo(json.dumps(payload))
    else:
        click.echo(text)


def reports_errors(command):
    """Map engine errors onto exit codes instead of tracebacks."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        ctx = click.get_current_context()
        try:
            return command(*args, **kwargs)
        except InvariantViolation as e:
            logger.error("❌ invariant violation: %s", e)
            click.echo(f"invariant violation: {e}", err=True)
            ctx.exit(EXIT_INVARIANT)
        except CalculusError as e:
            click.echo(f"error: {e}", err=True)
            ctx.exit(EXIT_USER_ERROR)

    return wrapper


def load_workspace(ctx: click.Context, ambient: Optional[int]) -> Workspace:
    """The -n ambient when given, else the workspace file's own, else the default."""
    settings: Settings = ctx.obj['settings']
    n = settings.check_ambient(ambient) if ambient is not None else None
    path = ctx.obj.get('workspace_path')
    if path:
        workspace = Workspace.load(path, ambient=n)
        settings.check_ambient(workspace.ambient)
        return workspace
    return Workspace.empty(n if n is not None else settings.check_ambient(settings.default_ambient))


@click.group()
@click.option('--json', 'as_json', is_flag=True, help='Print machine-readable JSON.')
@click.option('--workspace', type=click.Path(dir_okay=False), default=None,
              help='Workspace file with named bundles, surfaces and curves.')
@click.pass_context
def cli(ctx: click.Context, as_json: bool, workspace: Optional[str]):
    """Exact characteristic-class calculus on projective space."""
    if ctx.obj and 'settings' in ctx.obj:
        settings = ctx.obj['settings']
    else:
        try:
            settings = Settings.from_env()
        except CalculusError as e:
            click.echo(f"error: {e}", err=True)
            ctx.exit(EXIT_USER_ERROR)
    configure_logging(settings.log_level)
    ctx.obj = {
        'settings': settings,
        'as_json': as_json,
        'workspace_path': workspace or settings.workspace_path,
    }


@cli.command('eval')
@click.option('-n', 'ambient', type=int, default=None, help='Ambient dimension of P^n.')
@click.argument('expression')
@click.pass_context
@reports_errors
def eval_command(ctx: click.Context, ambient: Optional[int], expression: str):
    """Evaluate EXPRESSION and print its value."""
    workspace = load_workspace(ctx, ambient)
    expr, kind, value = evaluate_text(expression, workspace)
    payload = {"expr": print_expr(expr), **value_to_json(kind, value)}
    emit(payload, ctx.obj['as_json'], value_to_text(kind, value))


@cli.command('hrr')
@click.option('-n', 'ambient', type=int, default=None, help='Ambient dimension of P^n.')
@click.argument('expression')
@click.pass_context
@reports_errors
def hrr_command(ctx: click.Context, ambient: Optional[int], expression: str):
    """Compare chi(E) from K-theory with the integral of ch(E).td(P^n)."""
    workspace = load_workspace(ctx, ambient)
    _, kind, value = evaluate_text(expression, workspace)
    if kind != BUNDLE:
        raise UnsupportedInputError(f"hrr needs a Bundle-valued expression, got {kind}")
    report = hrr_check(value)
    payload = report.to_json()
    text = f"lhs   {payload['lhs']}\nrhs   {payload['rhs']}\nequal {str(report.equal).lower()}"
    emit(payload, ctx.obj['as_json'], text)
    if not report.equal:
        raise InvariantViolation(f"HRR fails for {expression}: {payload}")


@cli.command('chi-table')
@click.option('-n', 'ambient', type=int, default=None, help='Ambient dimension of P^n.')
@click.option('--dmin', type=int, default=-3, show_default=True)
@click.option('--dmax', type=int, default=3, show_default=True)
@click.pass_context
@reports_errors
def chi_table_command(ctx: click.Context, ambient: Optional[int], dmin: int, dmax: int):
    """chi(P^n, O(d)) for dmin <= d <= dmax, computed four ways."""
    settings: Settings = ctx.obj['settings']
    n = settings.check_ambient(ambient if ambient is not None else settings.default_ambient)
    rows = chi_table(n, dmin, dmax, settings.workers)
    payload = {"ambient": n, "rows": [row.to_json() for row in rows]}
    emit(payload, ctx.obj['as_json'], chi_table_frame(rows).to_string(index=False))


@cli.command('koszul')
@click.option('--vars', 'num_vars', type=int, required=True, help='Number of variables x0..x{m-1}.')
@click.option('--seq', 'sequence', required=True, help='Comma-separated homogeneous polynomials.')
@click.option('--max-degree', type=int, default=5, show_default=True)
@click.pass_context
@reports_errors
def koszul_command(ctx: click.Context, num_vars: int, sequence: str, max_degree: int):
    """Homology dimensions of the Koszul complex, per internal degree."""
    settings: Settings = ctx.obj['settings']
    seq = parse_sequence(num_vars, sequence.split(','))
    report = koszul_homology(seq, max_degree, settings.workers)
    emit(report.to_json(), ctx.obj['as_json'], report.to_table())


@cli.command('check')
@click.option('--cases', type=int, default=None, help='Randomized cases per group.')
@click.option('--seed', type=int, default=None)
@click.option('--group', 'groups', multiple=True, help='Run only the named property group(s).')
@click.pass_context
@reports_errors
def check_command(ctx: click.Context, cases: Optional[int], seed: Optional[int], groups: Sequence[str]):
    """Run the property suite; exits 2 on the first violated identity."""
    settings: Settings = ctx.obj['settings']
    suite = InvariantSuite(
        cases=cases if cases is not None else settings.check_cases,
        seed=seed if seed is not None else settings.check_seed,
        workers=settings.workers,
    )
    unknown = sorted(set(groups) - set(suite.groups))
    if unknown:
        raise UnsupportedInputError(f"unknown property group(s) {unknown}; choose from {sorted(suite.groups)}")
    results = suite.run(list(groups) or None)
    lines = [f"{g['name']:<16} {g['checks']:>6} checks  {g['seconds']:.2f}s" for g in results['groups']]
    lines.append(f"all {results['passed']} checks passed")
    emit(results, ctx.obj['as_json'], "\n".join(lines))


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and return its exit code."""
    try:
        code = cli.main(args=list(argv) if argv is not None else None, prog_name='hrrcalc',
                        standalone_mode=False)
    except click.ClickException as e:
        e.show()
        return EXIT_USER_ERROR
    except click.Abort:
        return EXIT_USER_ERROR
    return code if isinstance(code, int) else EXIT_OK
