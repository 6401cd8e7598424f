import numpy as np
import matplotlib.pyplot as plt

labels = ["Speed", "Power", "Range", "Cost", "Comfort"]
angles = np.linspace(0, 2 * np.pi, len(labels), endpoint=False)
angles = np.concatenate([angles, angles[:1]])

fig = plt.figure(figsize=(5, 5))
ax = fig.add_subplot(111, projection="polar")
for vals in ([4, 3, 5, 2, 4], [2, 5, 3, 4, 3]):
    vals = vals + vals[:1]
    ax.plot(angles, vals, marker="o", linewidth=2)  #1
ax.set_xticks(angles[:-1])
ax.set_xticklabels(labels)
ax.set_ylim(0, 6)
