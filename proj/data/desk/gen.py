# Generates the desk dataset: 40 clerks (30 m / 10 f), 12 managers
# (10 m / 2 f), Performance on a 1-5 scale with 12 best male clerks and
# 4 best female clerks above 3.5.
import csv, math, collections

people = []
employees = []

fams = ["single", "married", "widowed"]
depts = ["sales", "it", "hr", "ops"]
dates = ["2015-03-01", "2017-06-15", "2019-01-10", "2021-09-01"]
races = ["a", "b"]
high = ["4.0", "4.5", "5.0"]
low = ["2.0", "2.5", "3.0"]

pid = 0
def add(role, gender, perf):
    global pid
    pid += 1
    p = f"p{pid:03d}"
    preg = 0
    if gender == "f":
        preg = 1 + (pid % 2)
    people.append([p, f"sur{pid:03d}", f"name{pid:03d}", gender,
                   fams[pid % 3], preg, races[pid % 2]])
    employees.append(["acme", p, role, dates[pid % 4], depts[pid % 4], perf])

# clerks: 30 male (12 high, 18 low), 10 female (4 high, 6 low)
for i in range(12):
    add("clerk", "m", high[i % 3])
for i in range(18):
    add("clerk", "m", low[i % 3])
for i in range(4):
    add("clerk", "f", high[i % 3])
for i in range(6):
    add("clerk", "f", low[i % 3])
# managers: 10 male, 2 female
for i in range(10):
    add("manager", "m", high[i % 3])
for i in range(2):
    add("manager", "f", high[i % 3])

with open("person.csv", "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["pID", "Surname", "Name", "Gender", "FamSituation", "PregCount", "Race"])
    w.writerows(people)

with open("employee.csv", "w", newline="") as f:
    w = csv.writer(f, lineterminator="\n")
    w.writerow(["InstName", "pID", "Role", "IniDate", "Department", "Performance"])
    w.writerows(employees)

# sanity: Cramér's V of each clerk-view column against Gender
clerks = [e + p[1:] for e in employees for p in people
          if e[1] == p[0] and e[2] == "clerk"]
cols = ["InstName", "pID", "Role", "IniDate", "Department", "Performance",
        "Surname", "Name", "Gender", "FamSituation", "PregCount", "Race"]
gi = cols.index("Gender")

def cramers_v(rows, i, j):
    n = len(rows)
    obs = collections.Counter((r[i], r[j]) for r in rows)
    ra = collections.Counter(r[i] for r in rows)
    cb = collections.Counter(r[j] for r in rows)
    if len(ra) < 2 or len(cb) < 2:
        return 0.0
    chi2 = 0.0
    for a in ra:
        for b in cb:
            e = ra[a] * cb[b] / n
            chi2 += (obs.get((a, b), 0) - e) ** 2 / e
    return math.sqrt(chi2 / n / (min(len(ra), len(cb)) - 1))

for i, c in enumerate(cols):
    if i != gi:
        print(f"{c:12s} V={cramers_v(clerks, gi, i):.3f}")

best_m = sum(1 for r in clerks if r[gi] == "m" and float(r[5]) > 3.5)
best_f = sum(1 for r in clerks if r[gi] == "f" and float(r[5]) > 3.5)
print("BMC", best_m, "BFC", best_f, "p", math.ceil((best_m - best_f) / best_f))
