from metric_currents.cli import main

if __name__ == '__main__':
    main()
