import numpy as np
import matplotlib.pyplot as plt

x = np.arange(1, 6)
y = np.array([2.3, 3.1, 2.7, 4.0, 3.6])
err = np.array([0.3, 0.5, 0.2, 0.6, 0.4])

fig, ax = plt.subplots(figsize=(6, 4))
ax.bar(x, y, color="#ccd5ae")
ax.errorbar(x, y, yerr=err, fmt="none", ecolor="black", capsize=4)  #1
ax.set_ylim(0, 5)
