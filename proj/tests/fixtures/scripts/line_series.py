import numpy as np
import matplotlib.pyplot as plt

t = np.arange(0, 10)
fig, ax = plt.subplots(figsize=(6, 4))
ax.plot(t, np.sqrt(t) * 2.0, "s-", color="#264653", label="sqrt")  #1
ax.plot(t, 0.5 * t, "^-", color="#e9c46a", label="linear")  #2
ax.set_xlim(-0.5, 9.5)
ax.legend(loc="upper left")
ax.grid(alpha=0.3)
