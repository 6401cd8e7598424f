import numpy as np
import matplotlib.pyplot as plt

data = np.random.normal(loc=50, scale=12, size=400)

fig, ax = plt.subplots(figsize=(6, 4))
ax.hist(data, bins=8, color="#8ab17d", edgecolor="black")  #1
ax.set_xlabel("Response time (ms)")
ax.set_ylabel("Count")
plt.tight_layout()
