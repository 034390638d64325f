import logging

from flask import Flask, request
from flask_cors import CORS
from flask_restx import Api, Resource, fields

from dualkernel import __version__, commands
from dualkernel.config import Settings, configure_logging
from dualkernel.errors import ConfigurationError

logger = logging.getLogger(__name__)

SETTINGS_KEY = 'DUALKERNEL_SETTINGS'

app = Flask(__name__)
CORS(app)

# Initialize Flask-RESTX API with Swagger documentation
api = Api(
    app,
    version=__version__,
    title='Dual-Kernel Checker API',
    description='Evaluation, derivation checking, semantic sequents and LF proof checking',
    doc='/swagger/'  # Swagger UI will be available at /swagger/
)

# Request/response models for Swagger documentation
budget_fields = {
    'fuel': fields.Integer(required=False, description='β-steps allowed per evaluation', example=10000),
    'max_classes': fields.Integer(required=False, description='Bound on representatives per type', example=256),
}

eval_request = api.model('EvalRequest', {
    'term': fields.String(required=True, description='Closed term', example='(\\x. x) tt'),
    **budget_fields,
})

check_request = api.model('CheckRequest', {
    'derivation': fields.String(required=True, description='Derivation file contents',
                                example='(UNIT-F ". >> Unit set")'),
})

sem_request = api.model('SemRequest', {
    'sequent': fields.String(required=True, description='Sequent', example='. , x : Void >> tt in Void'),
    **budget_fields,
})

lf_check_request = api.model('LfCheckRequest', {
    'term': fields.String(required=True, description='Normal proof term', example='[x] x'),
    'type': fields.String(required=True, description='LF type', example='(Top) Top'),
    'signature': fields.String(required=False, description='Signature declarations', example='atom P;'),
    'context': fields.String(required=False, description='LF context', example='p : P'),
})

lf_infer_request = api.model('LfInferRequest', {
    'term': fields.String(required=True, description='Neutral proof term', example='f tt'),
    'signature': fields.String(required=False, description='Signature declarations'),
    'context': fields.String(required=False, description='LF context', example='f : (Top) Bot'),
})

lf_erase_request = api.model('LfEraseRequest', {
    'term': fields.String(required=True, description='Proof term', example='[x] x'),
})

bridge_request = api.model('BridgeRequest', {
    'term': fields.String(required=True, description='Closed proof term', example='[x] x'),
    'type': fields.String(required=True, description='LF type', example='(Bot) Bot'),
    'signature': fields.String(required=False, description='Signature declarations'),
    **budget_fields,
})

diagnostic_model = api.model('Diagnostic', {
    'message': fields.String(description='What went wrong'),
    'span': fields.Raw(description='file, line, column_start, column_end or null'),
})

report_model = api.model('Report', {
    'verdict': fields.String(description='accept, reject or unknown', example='accept'),
    'diagnostics': fields.List(fields.Nested(diagnostic_model)),
    'data': fields.Raw(description='Command specific payload'),
})

health_response = api.model('HealthResponse', {
    'status': fields.String(description='Service status', example='healthy'),
    'version': fields.String(description='Package version'),
    'service': fields.String(description='Service name', example='dualkernel'),
})

RESPONSES = {
    200: ('Report (verdict accept, reject or unknown)', report_model),
    400: 'Bad Request - missing field, parse error or invalid budget',
    500: 'Internal Server Error',
}


def create_app(settings=None):
    """Configure the module-level app with kernel settings and return it."""
    app.config[SETTINGS_KEY] = settings if settings is not None else Settings.from_env()
    configure_logging(app.config[SETTINGS_KEY].log_level)
    return app


def current_settings(data):
    """Server settings with the request's fuel and class bound applied."""
    base = app.config.get(SETTINGS_KEY) or Settings.from_env()
    return base.override(fuel=budget(data, 'fuel'), max_classes=budget(data, 'max_classes'))


def budget(data, name):
    # form fields arrive as strings
    value = data.get(name)
    if isinstance(value, str):
        if not value.strip():
            return None
        try:
            return int(value)
        except ValueError:
            raise ConfigurationError(f"{name} must be an integer, got {value!r}") from None
    return value


def request_data():
    # Get fields from JSON or form data
    if request.is_json:
        return request.get_json(silent=True) or {}
    return request.form.to_dict()


def respond(report):
    """HTTP response for a report; parse and usage failures are client errors."""
    body = report.to_dict()
    if report.usage_error:
        message = report.diagnostics[0].message if report.diagnostics else 'Invalid input'
        return {'error': message, 'report': body}, 400
    return body, 200


def handle(required, run):
    """Validate required fields, then run ``run(data)`` and wrap the result."""
    try:
        data = request_data()
        for name in required:
            if not data.get(name):
                return {'error': f'No {name} provided'}, 400
        return respond(run(data))
    except ConfigurationError as e:
        return {'error': e.message}, 400
    except Exception as e:
        logger.exception("request failed")
        return {'error': f'Error checking input: {str(e)}'}, 500


@api.route('/eval')
class Eval(Resource):
    @api.expect(eval_request)
    @api.doc('eval', description='Evaluate a closed term to canonical form', responses=RESPONSES)
    def post(self):
        """Evaluate a term"""
        return handle(['term'], lambda data: commands.run_eval(data['term'], current_settings(data)))


@api.route('/check')
class Check(Resource):
    @api.expect(check_request)
    @api.doc('check', description='Validate a derivation against the rule catalog', responses=RESPONSES)
    def post(self):
        """Check a derivation"""
        return handle(['derivation'], lambda data: commands.run_check(data['derivation']))


@api.route('/sem')
class Sem(Resource):
    @api.expect(sem_request)
    @api.doc('sem', description='Decide a functional sequent by its meaning explanation', responses=RESPONSES)
    def post(self):
        """Decide a sequent semantically"""
        return handle(['sequent'], lambda data: commands.run_sem(data['sequent'], current_settings(data)))


@api.route('/lf/check')
class LfCheck(Resource):
    @api.expect(lf_check_request)
    @api.doc('lf_check', description='Check a normal proof term against an LF type', responses=RESPONSES)
    def post(self):
        """Check a proof term"""
        return handle(['term', 'type'], lambda data: commands.run_lf_check(
            data['term'], data['type'], data.get('signature'), data.get('context')))


@api.route('/lf/infer')
class LfInfer(Resource):
    @api.expect(lf_infer_request)
    @api.doc('lf_infer', description='Synthesize the type of a neutral proof term', responses=RESPONSES)
    def post(self):
        """Infer the type of a proof term"""
        return handle(['term'], lambda data: commands.run_lf_infer(
            data['term'], data.get('signature'), data.get('context')))


@api.route('/lf/erase')
class LfErase(Resource):
    @api.expect(lf_erase_request)
    @api.doc('lf_erase', description='Erase a proof term to a computational term', responses=RESPONSES)
    def post(self):
        """Erase a proof term"""
        return handle(['term'], lambda data: commands.run_lf_erase(data['term']))


@api.route('/bridge')
class Bridge(Resource):
    @api.expect(bridge_request)
    @api.doc('bridge', description='Check, erase and semantically verify a closed proof term', responses=RESPONSES)
    def post(self):
        """Check a proof term in both kernels"""
        return handle(['term', 'type'], lambda data: commands.run_bridge(
            data['term'], data['type'], data.get('signature'), current_settings(data)))


@api.route('/health')
class Health(Resource):
    @api.marshal_with(health_response)
    @api.doc('health_check',
             description='Health check endpoint',
             responses={
                 200: 'Service health status'
             })
    def get(self):
        """Health check endpoint"""
        return {
            'status': 'healthy',
            'version': __version__,
            'service': 'dualkernel'
        }


if __name__ == '__main__':
    create_app()
    logger.warning("Server will be available at: http://localhost:8001")
    logger.warning("Swagger documentation available at: http://localhost:8001/swagger/")
    app.run(debug=True, host='0.0.0.0', port=8001)
