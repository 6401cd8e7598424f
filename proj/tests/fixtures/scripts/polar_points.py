import numpy as np
import matplotlib.pyplot as plt

theta = np.linspace(0, 2 * np.pi, 8, endpoint=False)
r = np.array([1.5, 2.5, 2.0, 3.2, 2.8, 1.9, 2.4, 3.0])

fig, ax = plt.subplots(figsize=(5, 5), subplot_kw={"projection": "polar"})
ax.plot(theta, r, linestyle="-", marker="D", markersize=7, color="#6a4c93")  #1
ax.set_rmax(3.5)
ax.set_title("Wind direction frequency")
