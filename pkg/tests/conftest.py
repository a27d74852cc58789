import io
from contextlib import redirect_stderr, redirect_stdout

import pytest

from fusionlab import cli


@pytest.fixture
def run_cli():
    def run(argv):
        out, err = io.StringIO(), io.StringIO()
        with redirect_stdout(out), redirect_stderr(err):
            code = cli.main(list(argv))
        return code, out.getvalue(), err.getvalue()

    return run
