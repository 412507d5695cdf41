import io
from pathlib import Path

import pytest

from gossip_flooding.common.errors import ConfigError, EdgeListParseError, GossipFloodingError, InvalidSizeError
from gossip_flooding.common.progress import ProgressPrinter
from gossip_flooding.common.validators import (validate_file, validate_json_file, validate_min,
                                               validate_probability, validate_range)


@pytest.mark.parametrize("value", [1, True, 2.0, "3"])
def test_validate_min_rejects(value):
    with pytest.raises(InvalidSizeError):
        validate_min(value, 2, "n")


def test_validate_range_and_probability():
    validate_range(3, 1, 3, "k")
    with pytest.raises(InvalidSizeError):
        validate_range(4, 1, 3, "k")
    validate_probability(1.0)
    with pytest.raises(InvalidSizeError):
        validate_probability(0.0)


def test_file_validators(tmp_path):
    config = tmp_path / "verify.json"
    config.write_text("{}")
    validate_file(config)
    validate_json_file(config)
    with pytest.raises(ConfigError):
        validate_file(tmp_path / "missing.txt")
    with pytest.raises(ConfigError):
        validate_json_file(Path(__file__))


def test_errors_share_a_base_class():
    error = EdgeListParseError(4, "bad")
    assert isinstance(error, GossipFloodingError)
    assert isinstance(error, ValueError)
    assert str(error) == "line 4: bad"


def test_progress_printer_writes_to_its_stream():
    stream = io.StringIO()
    progress = ProgressPrinter("Replications", 2, stream=stream)
    progress.update(1)
    progress.done()
    assert "Replications...1/2\r" in stream.getvalue()
    assert "Replications...Done!" in stream.getvalue()
