"""JSON Schemas (draft 2020-12) for the documents written by ``beatty-lab``.

Plain dictionaries so the package does not need a validator at runtime; the test
suite checks every subcommand's output against them with ``jsonschema``.
"""

_num = {"type": ["number", "null"]}
_int = {"type": "integer"}
_opt_int = {"type": ["integer", "null"]}

THEOREM_RESULT = {
    "type": "object",
    "required": ["lhs", "main", "error", "predicted_bound", "relative_deviation", "extra", "q"],
    "properties": {
        "lhs": _num, "main": _num, "error": _num, "predicted_bound": _num,
        "relative_deviation": _num, "q": _int,
        "extra": {"type": "object", "required": ["q", "t_lower", "prime_count"]},
    },
}

EXPSUM_RESULT = {
    "type": "object",
    "required": ["direct", "pieces", "residual", "bound", "ratio", "N", "L", "d", "f", "q", "U", "eps"],
    "properties": {
        "direct": _num, "residual": _num, "bound": _num, "ratio": _num,
        "pieces": {"type": "object", "additionalProperties": _num},
        "N": _int, "L": _int, "d": _int, "f": _int, "q": _int, "U": _int,
    },
}

BOUND_RESULT = {
    "type": "object",
    "required": ["bound", "m", "p_m", "p_ml", "exponents", "least_prime", "within_bound"],
    "properties": {
        "bound": _num, "m": _int, "p_m": _int, "p_ml": _int,
        "exponents": {"type": "array", "items": {"type": "number"}},
        "least_prime": _opt_int, "within_bound": {"type": ["boolean", "null"]},
        "min_l": _opt_int,
    },
}

CF_RESULT = {
    "type": "object",
    "required": ["quotients", "convergents"],
    "properties": {
        "quotients": {"type": "array", "items": _int},
        "convergents": {"type": "array", "items": {"type": "array", "items": _int, "minItems": 2, "maxItems": 2}},
    },
}

VALUE_RESULT = {"type": "object", "required": ["value"], "properties": {"value": _num}}

CONSTANTS_RESULT = {
    "type": "object",
    "required": ["theta", "psi", "tail", "theta_ok", "psi_ok", "tail_ok", "all_ok"],
    "properties": {k: {"type": "boolean"} for k in ("theta_ok", "psi_ok", "tail_ok", "all_ok")},
}

RESULTS = {
    "cf": CF_RESULT, "theta": VALUE_RESULT, "psi": VALUE_RESULT,
    "beatty": {"type": "object"},
    "expsum": EXPSUM_RESULT, "thm1": THEOREM_RESULT, "thm3": THEOREM_RESULT,
    "thm2": BOUND_RESULT, "remark1": BOUND_RESULT,
    "least-prime": {"type": "object", "required": ["p"], "properties": {"p": _int}},
    "constants": CONSTANTS_RESULT,
}


def document_schema(command: str) -> dict:
    """Schema of a single-run (``result``) or grid (``runs``) JSON document."""
    result = RESULTS[command]
    run = {"type": "object", "required": ["point", "result"],
           "properties": {"point": {"type": "object"}, "result": result, "seconds": {"type": "number"}}}
    return {
        "$schema": "https://json-schema.org/draft/2020-12/schema",
        "type": "object",
        "required": ["tool", "version", "command", "config"],
        "properties": {
            "tool": {"const": "beatty-lab"},
            "version": {"type": "string"},
            "command": {"const": command},
            "config": {"type": "object", "required": ["threads", "format", "reproducible"]},
            "seconds": {"type": "number"},
            "result": result,
            "runs": {"type": "array", "items": run},
        },
        "oneOf": [{"required": ["result"]}, {"required": ["runs"]}],
    }
