import numpy as np
import matplotlib.pyplot as plt

months = np.arange(1, 13)
solar = np.array([2, 3, 4, 6, 8, 9, 10, 9, 7, 5, 3, 2])
wind = np.array([6, 6, 5, 4, 4, 3, 3, 3, 4, 5, 6, 7])
hydro = np.array([4, 4, 5, 5, 5, 4, 4, 4, 4, 4, 4, 4])

fig, ax = plt.subplots(figsize=(6, 4))
ax.stackplot(months, solar, wind, hydro, labels=["solar", "wind", "hydro"])  #1
ax.legend(loc="upper left")
ax.set_xlim(1, 12)
