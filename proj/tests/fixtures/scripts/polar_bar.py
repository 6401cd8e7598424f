import numpy as np
import matplotlib.pyplot as plt

n = 6
theta = np.linspace(0.0, 2 * np.pi, n, endpoint=False)
radii = [4.0, 7.0, 3.0, 6.0, 5.0, 2.5]
width = 2 * np.pi / n * 0.8

ax = plt.subplot(projection="polar")
ax.bar(theta, radii, width=width, bottom=0.5, color=plt.cm.viridis(np.linspace(0, 1, n)))  #1
ax.set_yticklabels([])
