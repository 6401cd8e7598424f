import matplotlib.pyplot as plt

fig, ax = plt.subplots(figsize=(6, 4))
ax.fill([1, 3, 4, 2], [1, 1, 3, 3], color="#90be6d", alpha=0.8)  #1
ax.fill([5, 7, 6], [1, 1, 3], color="#f94144", alpha=0.8)  #2
ax.set_xlim(0, 8)
ax.set_ylim(0, 4)
