"""Golden CLI invocations, shared by the tests and scripts/regen_golden.py.

Paths are relative to ``tests/data``; ``@name`` is replaced by the output
of an earlier case with that name (fed on stdin as ``-``).
"""

GOLDEN = {
    "tree_info_pants": ["tree", "info", "pants.json"],
    "tree_info_pants_json": ["tree", "info", "pants.json", "--format", "json"],
    "tree_info_loch": ["tree", "info", "loch_ness.json"],
    "tree_truncate": ["tree", "truncate", "binary_pants.json", "--n", "1", "--format", "json"],
    "tree_truncate_dot": ["tree", "truncate", "binary_pants.json", "--n", "1", "--format", "dot"],
    "tree_canon": ["tree", "canon", "loch_ness.json", "--depth", "2"],
    "tree_validate": ["tree", "validate", "pants.json"],
    "forest_universal": ["forest", "universal", "--n", "1"],
    "forest_countable": ["forest", "countable", "loch_ness.json", "binary_pants.json", "--depth", "6", "--format", "json"],
    "forest_census": ["forest", "census", "@forest_countable"],
    "forest_ends": ["forest", "ends", "@forest_countable", "--depth", "3"],
    "forest_validate": ["forest", "validate", "@forest_countable"],
    "cover_case4": ["cover", "case", "--case", "4", "--n", "4"],
    "cover_case3_json": ["cover", "case", "--case", "3", "--n", "5", "--format", "json"],
    "cover_eval": ["cover", "eval", "case1_n4.json", "a b A"],
    "cover_spectrum": ["cover", "spectrum", "case1_n4.json", "b"],
    "cover_product": ["cover", "product", "case1_n4.json", "case1_n4.json", "--word", "a"],
    "cover_surgery": ["cover", "surgery", "identity.json", "S:a+", "identity.json", "S:a+"],
    "cover_tube": ["cover", "tube", "identity.json", "S:a+", "--k", "5"],
    "cover_driver": ["cover", "driver", "--cases", "1,3,4", "--n", "5"],
    "cert_tube": ["cert", "eval", "tube-genus", "--k", "5"],
    "cert_inj": ["cert", "eval", "inj-radius", "--sys", "1.1", "--k0", "4", "--sigma", "10"],
    "cert_collar": ["cert", "eval", "half-collar", "--sigma", "10", "--l-alpha", "2", "--format", "json"],
    "cert_glue": ["cert", "eval", "glue", "glue_parts.json", "--k", "3"],
    "tower_build": ["tower", "build", "@forest_countable", "--levels", "4", "--format", "json"],
    "tower_verify": ["tower", "verify", "@tower_build"],
    "tower_census": ["tower", "census", "@tower_build"],
    "tower_empty": ["tower", "build", "empty", "--levels", "2"],
}
