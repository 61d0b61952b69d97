import json
from dataclasses import dataclass, field

import numpy as np

from src.settings import SCHEMA_VERSION


@dataclass(frozen=True)
class OracleReport:
    name: str
    inputs: dict = field(default_factory=dict)
    value: object = None
    tolerance_used: float = 0.0

    def to_dict(self):
        value = self.value
        if isinstance(value, np.ndarray):
            value = value.tolist()
        elif isinstance(value, (np.floating, np.integer)):
            value = value.item()
        return {
            "schema": SCHEMA_VERSION,
            "oracle": self.name,
            "inputs": dict(self.inputs),
            "value": value,
            "tolerance_used": self.tolerance_used,
        }

    def to_json(self):
        # sorted keys and repr floats keep the output bit-for-bit reproducible
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)
