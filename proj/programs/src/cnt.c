/* Count and sum positive and negative entries of a 10x10 matrix. */
#define N 10
int m[N][N];
int postotal, negtotal, poscnt, negcnt;

static void sum(void) {
  for (int i = 0; i < N; i++)
    for (int j = 0; j < N; j++) {
      if (m[i][j] >= 0) {
        postotal += m[i][j];
        poscnt++;
      } else {
        negtotal += m[i][j];
        negcnt++;
      }
    }
}

int main(void) {
  int seed = 0;
  for (int i = 0; i < N; i++)
    for (int j = 0; j < N; j++) {
      seed = (seed * 133 + 81) % 8095;
      m[i][j] = seed - 4000;
    }
  sum();
  int check = 0;
  for (int i = 0; i < N; i++)
    for (int j = 0; j < N; j++) check += m[i][j];
  return check != postotal + negtotal || poscnt + negcnt != N * N;
}
