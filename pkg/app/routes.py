from flask import Blueprint, current_app, request, jsonify
import logging
import time

from app.models import Workspace
from app.utils.errors import CalculusError, DomainError, InvariantViolation, UnsupportedInputError
from app.utils.expression import BUNDLE, evaluate_text, print_expr, value_to_json
from app.utils.invariants import InvariantSuite
from app.utils.koszul import koszul_homology, parse_sequence
from app.utils.riemann_roch import chi_table, hrr_check

main = Blueprint('main', __name__)


def settings():
    return current_app.config['HRR_SETTINGS']


def request_workspace(data: dict) -> Workspace:
    """Inline workspace document, else the configured file, else an empty P^n.

    A request ambient overrides the workspace's own; without either the
    configured default applies.
    """
    ambient = data.get('ambient')
    if ambient is not None and (not isinstance(ambient, int) or isinstance(ambient, bool)):
        raise DomainError(f"ambient must be an integer, got {ambient!r}")
    n = settings().check_ambient(ambient) if ambient is not None else None
    if isinstance(data.get('workspace'), dict):
        workspace = Workspace.from_json(data['workspace'], ambient=n)
    elif settings().workspace_path:
        workspace = Workspace.load(settings().workspace_path, ambient=n)
    else:
        return Workspace.empty(n if n is not None else settings().check_ambient(settings().default_ambient))
    settings().check_ambient(workspace.ambient)
    return workspace


def expression_of(data: dict) -> str:
    expression = data.get('expr')
    if not isinstance(expression, str) or not expression.strip():
        raise DomainError("'expr' is required")
    return expression


@main.errorhandler(CalculusError)
def calculus_error(e: CalculusError):
    logging.warning(f"⚠️ {e.kind}: {e}")
    return jsonify(e.to_json()), 400


@main.errorhandler(InvariantViolation)
def invariant_violation(e: InvariantViolation):
    logging.error(f"❌ invariant violation: {e}")
    return jsonify({'error': str(e), 'kind': 'invariant_violation'}), 500


@main.route('/api/eval', methods=['POST'])
def eval_expression():
    """Evaluate an expression against a workspace"""
    data = request.get_json(silent=True) or {}
    expression = expression_of(data)
    expr, kind, value = evaluate_text(expression, request_workspace(data))
    logging.info(f"🧮 eval {print_expr(expr)} : {kind}")
    return jsonify({'expr': print_expr(expr), **value_to_json(kind, value)})


@main.route('/api/hrr', methods=['POST'])
def hrr():
    """chi from K-theory against the integral of ch.td"""
    data = request.get_json(silent=True) or {}
    expression = expression_of(data)
    _, kind, value = evaluate_text(expression, request_workspace(data))
    if kind != BUNDLE:
        raise UnsupportedInputError(f"hrr needs a Bundle-valued expression, got {kind}")
    report = hrr_check(value)
    if not report.equal:
        raise InvariantViolation(f"HRR fails for {expression}: {report.to_json()}")
    return jsonify(report.to_json())


@main.route('/api/chi-table')
def chi_table_rows():
    n = settings().check_ambient(request.args.get('n', settings().default_ambient, type=int))
    dmin = request.args.get('dmin', -3, type=int)
    dmax = request.args.get('dmax', 3, type=int)
    rows = chi_table(n, dmin, dmax, settings().workers)
    return jsonify({'ambient': n, 'rows': [row.to_json() for row in rows]})


@main.route('/api/koszul', methods=['POST'])
def koszul():
    """Koszul homology dimensions up to max_degree"""
    data = request.get_json(silent=True) or {}
    sequence = data.get('seq')
    if isinstance(sequence, str):
        sequence = sequence.split(',')
    if not isinstance(sequence, list) or not sequence:
        raise DomainError("'seq' must be a non-empty list of polynomials")
    num_vars = data.get('vars')
    if not isinstance(num_vars, int):
        raise DomainError("'vars' must be an integer")
    max_degree = data.get('max_degree', 5)
    if not isinstance(max_degree, int):
        raise DomainError("'max_degree' must be an integer")
    seq = parse_sequence(num_vars, [str(s) for s in sequence])
    return jsonify(koszul_homology(seq, max_degree, settings().workers).to_json())


@main.route('/api/check')
def check():
    """Run the property suite in-process"""
    cases = request.args.get('cases', settings().check_cases, type=int)
    if cases < 1:
        raise DomainError("cases must be at least 1")
    groups = request.args.getlist('group')
    suite = InvariantSuite(cases=cases, seed=settings().check_seed, workers=settings().workers)
    unknown = sorted(set(groups) - set(suite.groups))
    if unknown:
        raise UnsupportedInputError(f"unknown property group(s) {unknown}")
    start = time.time()
    results = suite.run(groups or None)
    logging.info(f"✅ check passed {results['passed']} checks in {time.time() - start:.2f}s")
    return jsonify(results)


@main.route('/api/status')
def system_status():
    """Configured limits and the available endpoints"""
    s = settings()
    return jsonify({
        'default_ambient': s.default_ambient,
        'max_ambient': s.max_ambient,
        'workers': s.workers,
        'workspace': s.workspace_path,
        'endpoints': ['/api/eval', '/api/hrr', '/api/chi-table', '/api/koszul', '/api/check', '/api/status'],
    })
