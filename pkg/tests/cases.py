"""Catalog parameter sweeps shared by several test modules."""

from lattice_forge.catalog import ModelParams

LINEAR_MAX = 20
QUADRATIC_MAX = 15

FAMILY_ARGS = {
    "krawtchouk": [{}],
    "para_krawtchouk": [{"delta": 0.5}, {"delta": 0.6}, {"delta": 1.4}],
    "q_racah": [{"big_k": 3}, {"big_k": 6}],
    "dual_hahn": [{"gamma": 0.5}, {"gamma": 1.3}, {"gamma": -0.4}],
    "para_racah": [{"a": 0.25, "c": 0.5}, {"a": 0.1, "c": 0.7}, {"a": 0.0, "c": 0.5}],
}


def catalog_cases(n_values=None, beta=1.7):
    out = []
    for fam, arg_sets in FAMILY_ARGS.items():
        top = QUADRATIC_MAX if fam in ("dual_hahn", "para_racah") else LINEAR_MAX
        ns = n_values or range(1, top + 1)
        for kw in arg_sets:
            for n in ns:
                if n <= top:
                    out.append(ModelParams(fam, n, beta, **kw))
    return out


def case_id(p):
    extra = ",".join(f"{k}={v}" for k, v in p.to_json().items() if k not in ("family", "n_max", "beta", "j_split"))
    return f"{p.family}-N{p.n_max}-{extra}" if extra else f"{p.family}-N{p.n_max}"
