import math

def select_next_move(warehouse_states):
  scores = []
  for state in warehouse_states:
    score = 0
    for stack in state:
      bonus = 0
      penalty = 0
      can_access = True
      for i in range(len(stack) - 1, -1, -1):
        priority_adjustment =\
            1 / (1 + math.exp(-0.7 * stack[i]))
        if can_access:
          bonus += (stack[i] *
                    (1 + math.exp(-0.5 * i)))
        if i > 0 and stack[i] < stack[i - 1]:
          penalty += ((1 - priority_adjustment) *
                      (stack[i - 1] - stack[i])
          * (1 / (1 + math.exp(0.5 * i))))
          can_access = False
      score += bonus - penalty
    scores.append(score)
  return scores
