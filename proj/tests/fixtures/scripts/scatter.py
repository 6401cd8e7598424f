import numpy as np
import matplotlib.pyplot as plt

x = np.array([1.0, 2.2, 3.1, 4.5, 5.0, 6.3])
y = np.array([2.0, 3.8, 2.9, 5.1, 4.2, 6.0])

fig, ax = plt.subplots(figsize=(6, 4))
ax.scatter(x, y, s=60, c="#e76f51")  #1
ax.plot(x, 0.8 * x + 1.0, color="gray", linestyle="--")
ax.set_xlim(0, 7)
ax.set_ylim(0, 7)
ax.set_title("Measured vs fitted")
