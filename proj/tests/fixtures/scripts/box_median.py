import numpy as np
import matplotlib.pyplot as plt

samples = [np.random.gamma(k, 1.0, 60) for k in (2.0, 3.0, 4.0)]

fig, ax = plt.subplots(figsize=(6, 4))
ax.boxplot(samples, medianprops={"color": "red", "linewidth": 1})  #1
ax.set_title("Gamma samples")
