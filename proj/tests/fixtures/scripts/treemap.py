import matplotlib.pyplot as plt
from matplotlib.patches import Rectangle

# Pre-computed slice-and-dice layout: (x, y, w, h, label)
cells = [
    (0.0, 0.0, 0.5, 1.0, "Compute"),
    (0.5, 0.0, 0.5, 0.6, "Storage"),
    (0.5, 0.6, 0.3, 0.4, "Network"),
    (0.8, 0.6, 0.2, 0.4, "Other"),
]
colors = ["#ffb703", "#219ebc", "#8ecae6", "#fb8500"]

fig, ax = plt.subplots(figsize=(6, 4))
for (x, y, w, h, label), color in zip(cells, colors):
    ax.add_patch(Rectangle((x, y), w, h, facecolor=color, edgecolor="white", linewidth=2))  #1
    ax.text(x + w / 2, y + h / 2, label, ha="center", va="center")
ax.set_xlim(0, 1)
ax.set_ylim(0, 1)
ax.axis("off")
