import io
import json
import sys

import pytest

from hypercat.cli import main


class CliResult:
    def __init__(self, code, text):
        self.code = code
        self.text = text

    def json(self):
        return json.loads(self.text)


@pytest.fixture
def run_cli():
    def run(*argv):
        buf = io.StringIO()
        code = main([str(a) for a in argv], out=buf)
        return CliResult(code, buf.getvalue())

    return run



def pytest_terminal_summary(terminalreporter):
    acceptance = sys.modules.get("test_acceptance")
    if acceptance is not None and acceptance.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in acceptance.RESULTS:
            terminalreporter.write_line(line)
