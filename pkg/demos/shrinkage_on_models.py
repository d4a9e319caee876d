"""PRISE of every shrinkage rule on the two synthetic models.

PRISE is the percentage improvement in mean squared error of the squared
partial coherences over the raw multitaper estimate. Oracle rules use the
true trace functionals; the ``-est`` rules use estimates from each draw.

Run with ``python3 demos/shrinkage_on_models.py`` (about 15 s).
"""

from speccoh import McConfig, make_model, run_campaign

METHODS = ("Raw", "HS", "QLa", "QLb", "HSP", "QLP", "QLa-est", "QLb-est", "QLP-est")

for kind in ("dense", "sparse"):
    model = make_model(kind, p=10)
    print(f"\n{kind} model, p=10, M=300 replicates per frequency")
    print("K    " + " ".join(f"{m:>8}" for m in METHODS[1:]))
    for k in (12, 14, 16):
        rep = run_campaign(model, McConfig(k, 300, 7, METHODS))
        avg = rep.average
        print(f"{k:<4} " + " ".join(f"{avg[m]:8.1f}" for m in METHODS[1:]))

print(
    "\nOn the dense model HS degrades as K grows and eventually does worse than"
    "\nthe raw estimate, while the QL rules stay positive. On the sparse model"
    "\nevery rule removes almost all of the error."
)
