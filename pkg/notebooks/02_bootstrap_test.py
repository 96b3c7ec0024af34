# ---
# jupyter:
#   jupytext:
#     formats: py:percent
#   kernelspec:
#     display_name: Python 3
#     language: python
#     name: python3
# ---

# %% [markdown]
# # One test, three calibrations
#
# The same integral statistic calibrated by the smoothed bootstrap, the
# naive bootstrap and the exponential (Durot-type) reference.

# %%
import numpy as np

from isohazard import BootstrapConfig, DFamily, RngStream, StatisticSpec, run_test, t_n

# %%
model = DFamily(-1.0)
x = model.sample(50, RngStream(11))
a = float(model.quantile(0.95))
print(f"T_n = {t_n(x, (0, a)):.5f}")

# %%
for method in ("smoothed_isotonic", "naive_isotonic", "exponential_durot"):
    out = run_test(x, a, BootstrapConfig(B=500, method=method))
    print(f"{method:18s} crit {out.critical_value:.5f}  p {out.p_value:.3f}  reject {out.reject}")

# %% [markdown]
# ## The sup statistic

# %%
out = run_test(x, a, BootstrapConfig(B=500, method="exponential_durot"), StatisticSpec("sup_durot"))
print(f"sup = {out.statistic:.4f}, crit = {out.critical_value:.4f}, reject = {out.reject}")

# %% [markdown]
# ## Spread of bootstrap values

# %%
out = run_test(x, a, BootstrapConfig(B=500))
print(np.percentile(out.bootstrap_values, [10, 50, 90]))
