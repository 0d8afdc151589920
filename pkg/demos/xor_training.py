"""Train a tiny network on XOR with every refinement method.

Each method runs twice: once from random weights and once from the
best weights the global search found. XOR is small enough that the
boosted runs all reach zero training error almost immediately.
"""

from codel.datasets import xor_dataset
from codel.local_search import METHODS, LocalSearchConfig
from codel.optimizer import CodelConfig
from codel.training import train_variant, variant_name


def main() -> None:
    data = xor_dataset()
    codel_config = CodelConfig(nfe_max=4000, seed=0)

    print(f"{'variant':>12}  {'search nfe':>10}  {'epochs':>6}  {'error %':>8}")
    for method in METHODS:
        for boosted in (False, True):
            model = train_variant(
                data, seed=0, hidden=(4,), codel_config=codel_config,
                ls_config=LocalSearchConfig(method=method),
                boosted=boosted,
            )
            print(f"{variant_name(method, boosted):>12}  "
                  f"{model.nfe_used:>10}  "
                  f"{len(model.refine_error):>6}  "
                  f"{model.train_error:>8.1f}")


if __name__ == "__main__":
    main()
