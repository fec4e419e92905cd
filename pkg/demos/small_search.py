"""Screen every weight-5 spec on a 3 x 5 group and keep the good ones.

About 48k specs are checked; expect a minute or two on one core.
"""

from tbcode.search import Budget, SearchQuery, run_search

query = SearchQuery(l_range=(3,), m_range=(5,), weight_pattern=(2, 3), min_k=4, min_d=5,
                    require_toric=True)
hits = 0
for rec in run_search(query, Budget(trials=200)):
    if rec.passed:
        hits += 1
        if hits <= 5:
            print(rec.spec.to_text(), f"[[{rec.n},{rec.k},{rec.d.value}]]", "toric", rec.toric)
print(f"{hits} specs pass the filters")
