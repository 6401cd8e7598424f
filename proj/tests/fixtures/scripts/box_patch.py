import numpy as np
import matplotlib.pyplot as plt

groups = [np.random.normal(m, 1.0, 40) for m in (3.0, 4.5, 2.5, 5.0)]

fig, ax = plt.subplots(figsize=(6, 4))
ax.boxplot(groups, patch_artist=True, boxprops={"facecolor": "#a8dadc"})  #1
ax.set_xticks([1, 2, 3, 4])
ax.set_xticklabels(["A", "B", "C", "D"])
ax.set_ylabel("Latency (s)")
