#pragma once

namespace cordes {

inline const char* config_schema() {
    return R"({
  "$schema": "http://json-schema.org/draft-07/schema#",
  "title": "cordes experiment config",
  "type": "object",
  "required": ["experiment"],
  "definitions": {
    "grid": {
      "type": "object",
      "required": ["n", "N", "L"],
      "additionalProperties": false,
      "properties": {
        "n": {"enum": [1, 2]},
        "N": {"type": "integer", "minimum": 4, "multipleOf": 2},
        "L": {"type": "number", "exclusiveMinimum": 0}
      }
    },
    "profile": {
      "type": "object",
      "required": ["type"],
      "properties": {
        "type": {"enum": ["constant", "gaussian", "hermite", "sine", "plane_wave", "sigmoid", "coordinate"]},
        "amplitude": {"type": "number"},
        "value": {"type": "number"},
        "axis": {"enum": [0, 1]},
        "width": {"$ref": "#/definitions/scalar_or_pair"},
        "center": {"$ref": "#/definitions/scalar_or_pair"},
        "order": {"$ref": "#/definitions/scalar_or_pair"},
        "k": {"$ref": "#/definitions/scalar_or_pair"},
        "freq": {"type": "number"},
        "phase": {"type": "number"},
        "allow_unbounded": {"type": "boolean"}
      }
    },
    "scalar_or_pair": {
      "oneOf": [
        {"type": "number"},
        {"type": "array", "items": {"type": "number"}, "minItems": 2, "maxItems": 2}
      ]
    },
    "symbol": {
      "type": "object",
      "required": ["family"],
      "properties": {
        "family": {"enum": ["constant", "gaussian", "trig", "multiplication", "multiplier", "shear_plus", "shear_minus"]},
        "value": {"type": "number"},
        "width_x": {"type": "number", "exclusiveMinimum": 0},
        "width_xi": {"type": "number", "exclusiveMinimum": 0},
        "center_x": {"$ref": "#/definitions/scalar_or_pair"},
        "center_xi": {"$ref": "#/definitions/scalar_or_pair"},
        "theta": {"type": "number"},
        "theta_x": {"type": "number"},
        "theta_xi": {"type": "number"},
        "profile": {"$ref": "#/definitions/profile"},
        "J": {"$ref": "#/definitions/matrix"},
        "periodic": {"type": "boolean"},
        "amplitude": {"type": "number"},
        "amplitudes": {"type": "array", "items": {"type": "number"}, "minItems": 1},
        "allow_unbounded": {"type": "boolean"}
      }
    },
    "matrix": {"type": "array", "items": {"type": "array", "items": {"type": "number"}}},
    "recovery": {
      "type": "object",
      "additionalProperties": false,
      "properties": {
        "T": {"type": "number", "exclusiveMinimum": 0},
        "W": {"type": "number", "exclusiveMinimum": 0},
        "Q": {"type": "integer", "minimum": 2},
        "Qx": {"type": "integer", "minimum": 2},
        "Qxi": {"type": "integer", "minimum": 2},
        "Qeta": {"type": "integer", "minimum": 2},
        "midpoint": {"type": "boolean"},
        "extrapolate": {"type": "boolean"},
        "kink_corrections": {"type": "boolean"},
        "delta": {"type": "number", "minimum": 0},
        "stencil_order": {"enum": [2, 4]},
        "coarse": {"type": "boolean"}
      }
    },
    "points": {"type": "array", "minItems": 1, "items": {"type": "array", "items": {"type": "number"}}},
    "levels": {
      "type": "array",
      "minItems": 1,
      "items": {
        "type": "object",
        "required": ["N", "L", "Q"],
        "properties": {
          "N": {"type": "integer", "minimum": 4, "multipleOf": 2},
          "L": {"type": "number", "exclusiveMinimum": 0},
          "Q": {"type": "integer", "minimum": 2}
        }
      }
    }
  },
  "properties": {
    "experiment": {"enum": ["ft-selftest", "quantize-check", "covariance", "reconstruct-identity", "roundtrip",
                            "cv-bound", "fibers", "commutant", "conjecture-demo", "convergence"]},
    "seed": {"type": "integer", "minimum": 0},
    "workers": {"type": "integer", "minimum": 1},
    "timing_in_csv": {"type": "boolean"},
    "output": {"type": "object", "additionalProperties": false, "properties": {"dir": {"type": "string"}}},
    "grid": {"$ref": "#/definitions/grid"},
    "count": {"type": "integer", "minimum": 1},
    "symbol": {"$ref": "#/definitions/symbol"},
    "symbols": {"type": "array", "minItems": 1, "items": {"$ref": "#/definitions/symbol"}},
    "shifts": {"type": "array", "minItems": 1, "items": {"type": "array", "items": {"type": "integer"}}},
    "points": {"type": "array", "minItems": 1, "items": {"type": "array", "items": {"type": "number"}}},
    "recovery": {"$ref": "#/definitions/recovery"},
    "refine": {"type": "integer", "minimum": 2, "maximum": 8},
    "levels": {"$ref": "#/definitions/levels"},
    "reference": {"type": "integer", "minimum": 0},
    "amplitudes": {"oneOf": [{"type": "null"}, {"type": "array", "minItems": 2, "items": {"type": "number"}}]},
    "direct": {"type": "boolean"},
    "tolerance": {"type": "number", "exclusiveMinimum": 0},
    "ratio_tolerance": {"type": "number", "exclusiveMinimum": 0},
    "ratio_min": {"type": "number", "exclusiveMinimum": 0},
    "thetas": {"type": "array", "minItems": 1, "items": {"type": "number", "exclusiveMinimum": 0}},
    "ratio_max": {"type": "number", "exclusiveMinimum": 0},
    "spread_max": {"type": "number", "exclusiveMinimum": 0},
    "slice_norms": {"type": "array", "minItems": 1, "items": {"type": "number", "exclusiveMinimum": 0}},
    "sizes": {"type": "array", "minItems": 1, "items": {"type": "integer", "minimum": 4, "maximum": 32, "multipleOf": 2}},
    "reference_N": {"type": "integer", "minimum": 4, "maximum": 32, "multipleOf": 2},
    "N": {"type": "integer", "minimum": 4, "maximum": 32, "multipleOf": 2},
    "J": {"$ref": "#/definitions/matrix"},
    "F": {"$ref": "#/definitions/profile"},
    "G_list": {"type": "array", "minItems": 1, "items": {"$ref": "#/definitions/profile"}},
    "negative_control": {"$ref": "#/definitions/symbol"},
    "control_min": {"type": "number", "exclusiveMinimum": 0},
    "residual_tol": {"type": "number", "exclusiveMinimum": 0},
    "recovery_tol": {"type": "number", "exclusiveMinimum": 0},
    "identity_tol": {"type": "number", "exclusiveMinimum": 0}
  },
  "additionalProperties": false
}
)";
}

}  // namespace cordes
