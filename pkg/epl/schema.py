from typing import Any, Dict, List

REPORT_SCHEMA_VERSION = 1


def complex_pair(z: Any) -> List[float]:
    z = complex(z)
    return [z.real, z.imag]


def build_report_structure(command: str, config: Dict[str, Any], body: Dict[str, Any]) -> dict:
    # no timestamp: identical runs must produce identical bytes
    report = {
        "schema_version": REPORT_SCHEMA_VERSION,
        "command": command,
        "config": config,
    }
    report.update(body)
    return report
