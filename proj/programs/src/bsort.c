/* Bubble sort of 64 words, worst case input. */
#define N 64
int data[N];

int main(void) {
  for (int i = 0; i < N; i++) data[i] = (N - i) * 37 - 500;
  for (int i = 0; i < N - 1; i++) {
    int swapped = 0;
    for (int j = 0; j < N - 1 - i; j++) {
      if (data[j] > data[j + 1]) {
        int t = data[j];
        data[j] = data[j + 1];
        data[j + 1] = t;
        swapped = 1;
      }
    }
    if (!swapped) break;
  }
  for (int i = 0; i < N - 1; i++)
    if (data[i] > data[i + 1]) return 1;
  return 0;
}
