"""Frozen reference values shared by the test modules.

Two kinds of constants live here:

* golden design values: the five/six-significant-digit operating points the
  implementation must reproduce (regression anchors for the design table);
* oracle scalars: frozen outputs of independent high-precision evaluations
  (mpmath at 60 significant digits), used so the tests never depend on the
  implementation under test for their expected values.
"""

# optimal access parameter alpha(K), five-decimal golden values
GOLDEN_ALPHA = {
    1: 1.0,
    2: 1.61803,
    3: 2.26953,
    4: 2.94519,
    5: 3.63955,
    6: 4.34905,
}

# (P[slot idle], P[slot unresolvable]) at the optimal operating point
GOLDEN_OUTCOME_PROBS = {
    1: (0.3679, 0.2642),
    2: (0.1983, 0.2213),
    3: (0.1034, 0.1945),
    4: (0.0526, 0.1756),
    5: (0.0263, 0.1614),
    6: (0.0129, 0.1501),
}

# oracle scalars, mpmath 60-digit evaluations frozen to double precision
ORACLE_Q_2_AT_1_61803 = 0.5191264034990994
ORACLE_Q_5_AT_3_63955 = 0.6988595716738288
ORACLE_ES_N10_Q0161803_K2 = 0.8399620946536479  # g(1+g)e^{-g} at g=1.61803
ORACLE_PMF_3_63955_5 = 0.13977217481946627
ORACLE_POISSON_9_9 = 0.13175564000952267
ORACLE_BOUND_1_05 = 0.3032653298563167  # 0.5*e^{-0.5}
ORACLE_BOUND_300_09 = 0.8657712185938914
ORACLE_BOUND_500_09 = 0.8903544857178393
ORACLE_BOUND_2000_095 = 0.9388889706379074
ORACLE_BOUND_3000_09 = 0.8999999933882665

# closed-form cross-check for K=2: the positive root of a^2 = a + 1
GOLDEN_RATIO = 1.618033988749895
