import matplotlib.pyplot as plt

years = [2018, 2019, 2020, 2021, 2022]
series = {
    "alpha": [3.1, 3.5, 2.8, 4.2, 4.9],
    "beta": [2.0, 2.6, 3.3, 3.0, 3.8],
}

fig, ax = plt.subplots(figsize=(6, 4))
for name, values in series.items():
    ax.plot(years, values, marker="o", linestyle="-", linewidth=1.5, label=name)  #1
ax.set_xticks(years)
ax.legend()
ax.set_ylabel("Revenue ($M)")
