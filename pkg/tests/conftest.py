import functools

from spalign.align import SearchParams, build_multiple_alignment
from spalign.kbio import load_fixture

# lines recorded by the acceptance suite, echoed at the end of the run
ACCEPTANCE_LINES: list[str] = []


@functools.lru_cache(maxsize=None)
def fixture(name):
    return load_fixture(name)


@functools.lru_cache(maxsize=None)
def best(name, max_alignments=2, beam_width=200):
    store, new = fixture(name)
    return tuple(
        build_multiple_alignment(
            new, store, SearchParams(beam_width=beam_width, max_alignments=max_alignments)
        )
    )


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
