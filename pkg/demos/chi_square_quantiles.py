"""Chi-square tail machinery: CDF, critical values, and the stop threshold.

The training loop stops once its Pearson statistic drops below a chi-square
critical value, so the library carries its own CDF (regularized incomplete
gamma) and quantile (bisection). This script shows both and checks a few
textbook values along the way.
"""
import math

from chi2nn.stats import chi2_cdf, chi2_quantile, critical_value

print("CDF of chi-square(3) at a few points:")
for x in (0.35, 2.37, 6.25, 7.81):
    print(f"  P(X <= {x:5.2f}) = {chi2_cdf(x, 3):.4f}")

print("\nUpper-tail critical values (rows: df, cols: alpha):")
alphas = (0.10, 0.05, 0.01)
print("  df | " + " | ".join(f"a={a}" for a in alphas))
for df in (1, 3, 7, 15, 31):
    cells = " | ".join(f"{chi2_quantile(df, a):7.3f}" for a in alphas)
    print(f"  {df:2d} | {cells}")

print("\nClosed-form cross-checks:")
print(f"  quantile(2, 0.05) = {chi2_quantile(2, 0.05):.6f}"
      f"  vs -2 ln 0.05 = {-2 * math.log(0.05):.6f}")
print(f"  CDF(1; 1) = {chi2_cdf(1.0, 1):.6f}"
      f"  vs erf(1/sqrt 2) = {math.erf(1 / math.sqrt(2)):.6f}")

crit = critical_value(15, 0.10)
print(f"\nA 16-section grid has 15 effective degrees of freedom;")
print(f"training would stop once the statistic falls below {crit.value:.3f}.")
