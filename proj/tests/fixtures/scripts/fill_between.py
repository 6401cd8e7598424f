import numpy as np
import matplotlib.pyplot as plt

x = np.linspace(-4, 6, 200)
pdf_a = np.exp(-0.5 * x ** 2) / np.sqrt(2 * np.pi)
pdf_b = np.exp(-0.5 * ((x - 2) / 1.3) ** 2) / (1.3 * np.sqrt(2 * np.pi))

fig, ax = plt.subplots(figsize=(6, 4))
for pdf, color in ((pdf_a, "#457b9d"), (pdf_b, "#e63946")):
    ax.plot(x, pdf, color=color)
    ax.fill_between(x, pdf, alpha=0.35, color=color)  #1
ax.set_ylim(0, 0.45)
ax.set_title("Density estimates")
