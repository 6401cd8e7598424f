import matplotlib.pyplot as plt

shares = [35, 25, 20, 12, 8]
names = ["Chrome", "Safari", "Edge", "Firefox", "Other"]

fig, ax = plt.subplots(figsize=(5, 5))
ax.pie(shares, labels=names, startangle=90, wedgeprops={"width": 0.45})  #1
ax.set_aspect("equal")
ax.set_title("Browser share")
