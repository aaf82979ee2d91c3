"""
Evolution against an accuracy table, with and without score seeding
===================================================================

Aging evolution (tournament parents, oldest-out replacement) usually
burns its early budget evaluating random genotypes.  Score-assisted
evolution spends cheap forward passes first: draw a double-size pool,
score it untrained, and only ever "train" (here: look up) the top half.
Same evaluation budget, better starting population.
"""

from naswot import (
    NetworkConfig,
    OpKind,
    area_search,
    make_scorer,
    random_normal_batch,
    rea_search,
)

# stand-in for a trained-accuracy lookup: a synthetic table that rewards
# convolution edges, so the optimum is known and runs are instant

def table_accuracy(genotype):
    ops = genotype.ops
    return (10.0 * sum(op is OpKind.CONV_3X3 for op in ops)
            + 2.0 * sum(op is OpKind.CONV_1X1 for op in ops)
            + 1.0 * sum(op is OpKind.IDENTITY for op in ops))

config = NetworkConfig.desk()
batch = random_normal_batch((8, 3, 8, 8), seed=0)
scorer = make_scorer(config, batch)

# with budget == population the comparison isolates the seeding step,
# because both searches draw candidates from the same stream
print("initial populations only (budget = 10 evaluations)")
print("seed  plain-evolution  score-assisted")
wins = ties = 0
for seed in range(10):
    plain = rea_search(table_accuracy, population_size=10, tournament_size=5,
                       budget_evals=10, rng=seed)
    assisted = area_search(scorer, table_accuracy, pool_size=20, population_size=10,
                           tournament_size=5, budget_evals=10, rng=seed)
    a, b = plain.chosen.accuracy, assisted.chosen.accuracy
    print(f"{seed:4d}  {a:15.2f}  {b:14.2f}")
    wins += b > a
    ties += b == a
print(f"assisted: {wins} wins, {ties} ties, {10 - wins - ties} losses")
print("(the proxy is imperfect, so single seeds can lose; if accuracy were a")
print(" monotone function of the score the assisted run could never do worse)")

# the guarantee itself, shown with a deliberately monotone evaluator
def score_as_accuracy(genotype):
    s = scorer(genotype)
    return s.value if s.is_valid else float("-inf")

never_worse = True
for seed in range(10):
    plain = rea_search(score_as_accuracy, population_size=10, tournament_size=5,
                       budget_evals=10, rng=seed)
    assisted = area_search(scorer, score_as_accuracy, pool_size=20, population_size=10,
                           tournament_size=5, budget_evals=10, rng=seed)
    never_worse &= assisted.chosen.accuracy >= plain.chosen.accuracy
print("with a score-monotone evaluator, assisted never worse:", never_worse)

# with a longer budget the two runs mutate along different paths, so the
# head start helps on average but single seeds can go either way
print("\nfull runs (budget = 60 evaluations)")
totals = [0.0, 0.0]
for seed in range(10):
    plain = rea_search(table_accuracy, population_size=10, tournament_size=5,
                       budget_evals=60, rng=seed)
    assisted = area_search(scorer, table_accuracy, pool_size=20, population_size=10,
                           tournament_size=5, budget_evals=60, rng=seed)
    totals[0] += plain.chosen.accuracy
    totals[1] += assisted.chosen.accuracy
print(f"mean over 10 seeds: plain {totals[0] / 10:.2f}  assisted {totals[1] / 10:.2f}")
