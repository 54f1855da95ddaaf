import json
from datetime import datetime, timezone
from pathlib import Path


def append_log(path: Path, event: dict) -> None:
    """One JSON line per CLI run; the run log is the only place timestamps go."""
    path.parent.mkdir(parents=True, exist_ok=True)
    event = dict(event)
    event["timestamp"] = datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")

    with path.open("a", encoding="utf-8") as f:
        f.write(json.dumps(event, sort_keys=True) + "\n")
