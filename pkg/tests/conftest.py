from __future__ import annotations

import pytest

from sela import CodeImage, parse_script, reference_code, run_scenario

TWO_VOTERS = """\
SECTION 1 2
VOTER
  VOTE 1 13
  CONFIRM 1
END_VOTER
VOTER
  VOTE 1 13
  CONFIRM 1
END_VOTER
FINALIZE
"""


@pytest.fixture(scope="session")
def ref_code() -> CodeImage:
    return reference_code()


@pytest.fixture()
def two_voter_run(ref_code):
    return run_scenario(parse_script(TWO_VOTERS), ref_code)
