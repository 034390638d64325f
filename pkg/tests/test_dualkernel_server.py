import pytest

import dualkernel_server
from dualkernel import __version__
from dualkernel.config import Settings
from dualkernel_server import SETTINGS_KEY, app, create_app

pytestmark = pytest.mark.usefixtures('restore_logging')

OMEGA = r"(\x. x x) (\x. x x)"


class TestEvalEndpoint:
    """Test the POST /eval endpoint."""

    def test_eval_success_json(self, client):
        response = client.post('/eval', json={'term': r'(\x. x) tt'})

        assert response.status_code == 200
        assert response.get_json() == {
            'verdict': 'accept',
            'diagnostics': [],
            'data': {'result': 'value', 'value': 'tt', 'steps': 1},
        }

    def test_eval_success_form(self, client):
        response = client.post('/eval', data={'term': r'(\x. \y. y) Unit tt', 'fuel': '30'})

        assert response.status_code == 200
        assert response.get_json()['data'] == {'result': 'value', 'value': 'tt', 'steps': 2}

    def test_eval_stuck_is_a_rejection(self, client):
        response = client.post('/eval', json={'term': 'tt tt'})

        assert response.status_code == 200
        data = response.get_json()
        assert data['verdict'] == 'reject'
        assert data['data']['at'] == 'tt tt'

    def test_eval_uses_server_fuel(self, client):
        response = client.post('/eval', json={'term': OMEGA})

        assert response.status_code == 200
        data = response.get_json()
        assert data['verdict'] == 'unknown'
        assert 'within 500 steps' in data['diagnostics'][0]['message']

    def test_eval_request_fuel_overrides(self, client):
        response = client.post('/eval', json={'term': OMEGA, 'fuel': 25})

        assert 'within 25 steps' in response.get_json()['diagnostics'][0]['message']

    def test_eval_no_term_json(self, client):
        response = client.post('/eval', json={})

        assert response.status_code == 400
        assert 'No term provided' in response.get_json()['error']

    def test_eval_no_term_form(self, client):
        response = client.post('/eval', data={})

        assert response.status_code == 400
        assert 'No term provided' in response.get_json()['error']

    def test_eval_empty_string(self, client):
        response = client.post('/eval', json={'term': ''})

        assert response.status_code == 400

    def test_eval_parse_error(self, client):
        response = client.post('/eval', json={'term': r'\x x'})

        assert response.status_code == 400
        data = response.get_json()
        assert 'error' in data
        assert data['report']['verdict'] == 'reject'
        span = data['report']['diagnostics'][0]['span']
        assert span['line'] == 1

    @pytest.mark.parametrize('payload', [
        {'term': 'tt', 'fuel': 0},
        {'term': 'tt', 'fuel': -4},
        {'term': 'tt', 'max_classes': 0},
    ])
    def test_eval_invalid_budget_json(self, client, payload):
        response = client.post('/eval', json=payload)

        assert response.status_code == 400
        assert 'must be a positive integer' in response.get_json()['error']

    def test_eval_invalid_budget_form(self, client):
        response = client.post('/eval', data={'term': 'tt', 'fuel': 'lots'})

        assert response.status_code == 400
        assert 'fuel must be an integer' in response.get_json()['error']

    def test_eval_blank_form_budget_is_ignored(self, client):
        response = client.post('/eval', data={'term': 'tt', 'fuel': ''})

        assert response.status_code == 200

    def test_eval_exception(self, client, mocker):
        mocker.patch('dualkernel_server.commands.run_eval', side_effect=RuntimeError('boom'))

        response = client.post('/eval', json={'term': 'tt'})

        assert response.status_code == 500
        assert 'Error checking input: boom' in response.get_json()['error']


class TestCheckEndpoint:
    """Test the POST /check endpoint."""

    def test_check_accepts(self, client):
        response = client.post('/check', json={'derivation': '(UNIT-F ". >> Unit set")'})

        assert response.status_code == 200
        assert response.get_json()['data'] == {'rule': 'UNIT-F', 'conclusion': '. >> Unit set'}

    def test_check_rejects(self, client):
        response = client.post('/check', json={'derivation': '(UNIT-F ". >> Void set")'})

        assert response.status_code == 200
        data = response.get_json()
        assert data['verdict'] == 'reject'
        assert data['data']['error'] == 'pattern-mismatch'

    def test_check_no_derivation(self, client):
        response = client.post('/check', json={'term': 'tt'})

        assert response.status_code == 400
        assert 'No derivation provided' in response.get_json()['error']

    def test_check_syntax_error(self, client):
        response = client.post('/check', json={'derivation': '(UNIT-F'})

        assert response.status_code == 400


class TestSemEndpoint:
    """Test the POST /sem endpoint."""

    def test_sem_vacuous_sequent(self, client):
        response = client.post('/sem', json={'sequent': '. , x : Void >> tt in Void'})

        assert response.status_code == 200
        assert response.get_json()['verdict'] == 'accept'

    def test_sem_counterexample(self, client):
        response = client.post('/sem', json={'sequent': '. >> Unit = Void set'})

        data = response.get_json()
        assert data['verdict'] == 'reject'
        assert data['data']['reason'] == 'counterexample'

    def test_sem_out_of_fuel(self, client):
        response = client.post('/sem', json={'sequent': f'. >> {OMEGA} in Unit', 'fuel': 40})

        data = response.get_json()
        assert data['verdict'] == 'unknown'
        assert data['data']['reason'] == 'fuel'


class TestLfEndpoints:
    """Test the proof-term endpoints."""

    def test_lf_check(self, client):
        response = client.post('/lf/check', json={'term': '[x] x', 'type': '(Top) Top'})

        assert response.status_code == 200
        assert response.get_json()['data'] == {'type': '(Top) Top'}

    def test_lf_check_with_signature_and_context(self, client):
        response = client.post('/lf/check', json={
            'term': 'f a',
            'type': 'B',
            'signature': 'atom A; atom B; const a : A;',
            'context': 'f : (A) B',
        })

        assert response.get_json()['verdict'] == 'accept'

    def test_lf_check_rejects(self, client):
        response = client.post('/lf/check', json={'term': 'tt', 'type': 'Bot'})

        data = response.get_json()
        assert data['verdict'] == 'reject'
        assert data['data'] == {'error': 'intro-against-wrong-type'}

    def test_lf_check_no_type(self, client):
        response = client.post('/lf/check', json={'term': 'tt'})

        assert response.status_code == 400
        assert 'No type provided' in response.get_json()['error']

    def test_lf_infer(self, client):
        response = client.post('/lf/infer', json={'term': 'f tt', 'context': 'f : (Top) Bot'})

        assert response.get_json()['data'] == {'type': 'Bot'}

    def test_lf_erase(self, client):
        response = client.post('/lf/erase', json={'term': '[f] [x] f x'})

        assert response.get_json()['data'] == {'expr': r'\f. \x. f x'}

    def test_bridge(self, client):
        response = client.post('/bridge', json={'term': '[x] x', 'type': '(Bot) Bot'})

        assert response.status_code == 200
        assert response.get_json()['data'] == {'expr': r'\x. x', 'type': 'Pi (_ : Void) Void'}

    def test_bridge_outside_fragment(self, client):
        response = client.post('/bridge', json={'term': '<tt, tt>', 'type': 'Top * Top'})

        assert response.get_json()['data'] == {'error': 'not-erasable'}


class TestHealthAPIEndpoint:
    """Test the GET /health endpoint."""

    def test_health_endpoint_success(self, client):
        response = client.get('/health')

        assert response.status_code == 200
        assert response.get_json() == {'status': 'healthy', 'version': __version__, 'service': 'dualkernel'}

    def test_health_endpoint_content_type(self, client):
        response = client.get('/health')

        assert response.content_type == 'application/json'


class TestApplicationSetup:
    """Test application configuration and setup."""

    def test_app_configuration(self, client):
        assert app.config.get('TESTING', False) is True
        assert app.config[SETTINGS_KEY] == Settings(fuel=500)

    def test_create_app_reads_environment(self, monkeypatch):
        monkeypatch.setenv('DUALKERNEL_FUEL', '123')

        assert create_app().config[SETTINGS_KEY].fuel == 123

    def test_current_settings_without_app_settings(self, monkeypatch):
        monkeypatch.delitem(app.config, SETTINGS_KEY, raising=False)
        monkeypatch.setenv('DUALKERNEL_MAX_CLASSES', '9')

        settings = dualkernel_server.current_settings({'fuel': 7})

        assert (settings.fuel, settings.max_classes) == (7, 9)

    def test_cors_enabled(self, client):
        response = client.get('/health', headers={'Origin': 'http://example.com'})

        assert response.headers.get('Access-Control-Allow-Origin') in ('*', 'http://example.com')

    def test_swagger_lists_every_endpoint(self, client):
        response = client.get('/swagger.json')

        assert response.status_code == 200
        paths = response.get_json()['paths']
        for path in ('/eval', '/check', '/sem', '/lf/check', '/lf/infer', '/lf/erase', '/bridge', '/health'):
            assert path in paths


class TestErrorHandling:
    """Test error handling scenarios."""

    def test_invalid_endpoint(self, client):
        response = client.get('/non-existent')
        assert response.status_code == 404

    def test_eval_method_not_allowed(self, client):
        response = client.get('/eval')
        assert response.status_code == 405

    def test_health_post_method(self, client):
        response = client.post('/health')
        assert response.status_code == 405
